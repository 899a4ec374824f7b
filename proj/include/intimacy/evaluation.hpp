#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "intimacy/corpus.hpp"
#include "intimacy/metrics.hpp"
#include "intimacy/regressor.hpp"
#include "intimacy/representation.hpp"
#include "intimacy/translation.hpp"

namespace intimacy {

struct LanguageMetrics {
  std::size_t n = 0;
  MetricPair metrics;
};

/// Aggregate over a group of languages. `pooled` scores all of the group's
/// records together; the macro fields average the per-language values, with
/// undefined correlations skipped and counted.
struct GroupMetrics {
  std::size_t n = 0;
  std::size_t languages = 0;
  std::optional<MetricPair> pooled;
  std::optional<double> macro_pearson_r;
  std::optional<double> macro_mse;
  std::size_t undefined_r_skipped = 0;
};

struct EvaluationReport {
  std::map<std::string, LanguageMetrics> per_language;
  GroupMetrics seen;
  GroupMetrics unseen;
  GroupMetrics overall;
};

/// Scores predictions against labeled gold data, per language and for the
/// seen, unseen and overall groups. Every gold id needs a prediction.
EvaluationReport evaluate_by_language(const std::unordered_map<std::string, double>& predictions,
                                      const Dataset& gold, const LanguageSet& seen,
                                      const LanguageSet& unseen);

/// Training/evaluation representation pairs compared under leave-one-language-out.
enum class GridRow {
  original_original,
  original_translated,
  translated_translated,
  translated_original,
  joint_joint,
};

inline constexpr std::array<GridRow, 5> kGridRows{
    GridRow::original_original, GridRow::original_translated, GridRow::translated_translated,
    GridRow::translated_original, GridRow::joint_joint};

Strategy train_strategy(GridRow row) noexcept;
Strategy eval_strategy(GridRow row) noexcept;
/// e.g. "train:original/eval:translated"
std::string label(GridRow row);

struct GridCell {
  MetricPair metrics;
  std::size_t train_records = 0;
  std::size_t eval_records = 0;
};

struct ZeroShotGrid {
  std::vector<std::string> excluded_languages;      // column order
  std::array<std::vector<GridCell>, 5> cells;       // [row][column]

  const GridCell& at(GridRow row, std::string_view language) const;
};

/// Receives the record ids of every training batch of every cell. Must be
/// thread-safe when the grid runs on more than one thread.
using GridAuditor =
    std::function<void(GridRow row, std::string_view excluded, std::span<const std::string> ids)>;

struct GridOptions {
  MissingTranslation policy = MissingTranslation::error;
  HashGramOptions features;
  GridAuditor auditor;
  std::size_t threads = 1;
};

/// For each excluded language and each GridRow, trains one model on the other
/// languages rendered with the row's training strategy and scores it on the
/// excluded language rendered with the row's evaluation strategy. Every cell
/// uses `config` as given, seed included.
ZeroShotGrid run_zero_shot_grid(const Dataset& train, const TranslationMap& translations,
                                const TrainingConfig& config,
                                const std::vector<std::string>& excludable,
                                const GridOptions& options = {});

}  // namespace intimacy
