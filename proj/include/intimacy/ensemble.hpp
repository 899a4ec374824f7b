#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "intimacy/corpus.hpp"
#include "intimacy/regressor.hpp"
#include "intimacy/representation.hpp"
#include "intimacy/translation.hpp"

namespace intimacy {

inline constexpr std::size_t kDefaultEnsembleSize = 7;

/// Members are opaque references (model blob paths, adapter model
/// directories, or in-memory keys) resolved by a MemberPredictor.
struct EnsembleSpec {
  std::vector<std::string> members;
  Strategy strategy = Strategy::original;

  void validate() const;
};

const LanguageSet& default_seen_languages();
const LanguageSet& default_unseen_languages();

/// Seen languages go to an original-text ensemble, unseen ones to a joint
/// ensemble.
struct Router {
  LanguageSet seen = default_seen_languages();
  LanguageSet unseen = default_unseen_languages();
  EnsembleSpec seen_ensemble{{}, Strategy::original};
  EnsembleSpec unseen_ensemble{{}, Strategy::joint};

  void validate() const;
};

/// Seed of ensemble member `index` trained from `base_seed`.
constexpr std::uint64_t member_seed(std::uint64_t base_seed, std::size_t index) noexcept {
  return base_seed + index;
}

/// Elementwise mean over models. Throws on an empty model list or ragged rows.
std::vector<double> average_predictions(std::span<const std::vector<double>> per_model);

/// Trains `size` models that differ only in seed (member_seed(config.seed, i)).
/// Members are independent and trained on up to `threads` threads.
std::vector<ModelHandle> train_ensemble(std::span<const RenderedInput> inputs,
                                        std::span<const double> labels,
                                        const TrainingConfig& config, std::size_t size,
                                        const TrainOptions& options = {},
                                        std::size_t threads = 1);

using Renderer = std::function<RenderedInput(const TweetRecord&,
                                             std::optional<std::string_view>, Strategy)>;
Renderer default_renderer(MissingTranslation policy = MissingTranslation::error);

/// Scores a batch of rendered inputs with one ensemble member, one score per
/// input in order.
using MemberPredictor =
    std::function<std::vector<double>(const std::string& member, std::span<const RenderedInput>)>;

enum class Route { seen, unseen };
std::string_view to_string(Route route) noexcept;

struct RoutedScore {
  std::string language;
  double score = 0.0;
  Route route = Route::seen;

  bool operator==(const RoutedScore&) const = default;
};

/// Keyed by record id.
using RoutedPredictions = std::map<std::string, RoutedScore>;

struct RouteOptions {
  bool clamp = false;
};

/// Scores every test record exactly once with the mean of the ensemble its
/// language routes to. Languages outside both sets are rejected up front.
RoutedPredictions route_predict(const Router& router, const Dataset& test,
                                const TranslationMap& translations, const Renderer& renderer,
                                const MemberPredictor& predictor, const RouteOptions& options = {});

/// CSV `id,language,score,ensemble` in id order.
void write_predictions(const std::filesystem::path& path, const RoutedPredictions& predictions);
/// Reads a prediction dump (only the id and score columns are required).
std::unordered_map<std::string, double> read_prediction_scores(const std::filesystem::path& path);

}  // namespace intimacy
