#include "intimacy/ensemble.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "intimacy/csv.hpp"
#include "intimacy/error.hpp"

namespace intimacy {

void EnsembleSpec::validate() const {
  if (members.empty()) throw Error(ErrorCategory::argument, "an ensemble needs at least one member");
}

const LanguageSet& default_seen_languages() {
  static const LanguageSet seen{"en", "es", "it", "pt", "fr", "zh"};
  return seen;
}

const LanguageSet& default_unseen_languages() {
  static const LanguageSet unseen{"hi", "ar", "nl", "ko"};
  return unseen;
}

void Router::validate() const {
  std::vector<std::string> overlap;
  for (const auto& lang : seen) {
    if (unseen.contains(lang)) overlap.push_back(lang);
  }
  if (!overlap.empty()) {
    throw Error(ErrorCategory::argument,
                "languages routed both ways: " + join_limited(overlap), overlap);
  }
  if (seen_ensemble.strategy != Strategy::original) {
    throw Error(ErrorCategory::argument, "the seen-language ensemble must use original text");
  }
  if (unseen_ensemble.strategy != Strategy::joint) {
    throw Error(ErrorCategory::argument, "the unseen-language ensemble must use joint text");
  }
  seen_ensemble.validate();
  unseen_ensemble.validate();
}

std::vector<double> average_predictions(std::span<const std::vector<double>> per_model) {
  if (per_model.empty()) throw Error(ErrorCategory::argument, "no model predictions to average");
  const std::size_t n = per_model.front().size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    if (per_model[m].size() != n) {
      throw Error(ErrorCategory::argument,
                  "model " + std::to_string(m) + " produced " +
                      std::to_string(per_model[m].size()) + " predictions, expected " +
                      std::to_string(n));
    }
    sum += Eigen::Map<const Eigen::VectorXd>(per_model[m].data(), static_cast<Eigen::Index>(n));
  }
  sum /= static_cast<double>(per_model.size());
  return {sum.data(), sum.data() + sum.size()};
}

std::vector<ModelHandle> train_ensemble(std::span<const RenderedInput> inputs,
                                        std::span<const double> labels,
                                        const TrainingConfig& config, std::size_t size,
                                        const TrainOptions& options, std::size_t threads) {
  if (size == 0) throw Error(ErrorCategory::argument, "ensemble size must be >= 1");
  std::vector<std::optional<ModelHandle>> slots(size);
  std::vector<std::exception_ptr> errors(size);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i; (i = next++) < size;) {
      try {
        TrainingConfig member = config;
        member.seed = member_seed(config.seed, i);
        TrainOptions member_options = options;
        member_options.trace = nullptr;
        slots[i] = train(inputs, labels, member, member_options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, size);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<ModelHandle> members;
  members.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    members.push_back(std::move(*slots[i]));
  }
  return members;
}

Renderer default_renderer(MissingTranslation policy) {
  return [policy](const TweetRecord& record, std::optional<std::string_view> translation,
                  Strategy strategy) { return render(record, translation, strategy, policy); };
}

std::string_view to_string(Route route) noexcept {
  return route == Route::seen ? "seen" : "unseen";
}

RoutedPredictions route_predict(const Router& router, const Dataset& test,
                                const TranslationMap& translations, const Renderer& renderer,
                                const MemberPredictor& predictor, const RouteOptions& options) {
  router.validate();

  LanguageSet unroutable;
  for (const auto& r : test.records) {
    if (!router.seen.contains(r.language) && !router.unseen.contains(r.language)) {
      unroutable.insert(r.language);
    }
  }
  if (!unroutable.empty()) {
    std::vector<std::string> codes(unroutable.begin(), unroutable.end());
    throw Error(ErrorCategory::routing,
                "no ensemble for language(s): " + join_limited(codes), codes);
  }

  RoutedPredictions out;
  for (const Route route : {Route::seen, Route::unseen}) {
    const EnsembleSpec& ensemble =
        route == Route::seen ? router.seen_ensemble : router.unseen_ensemble;
    const LanguageSet& languages = route == Route::seen ? router.seen : router.unseen;

    std::vector<const TweetRecord*> records;
    std::vector<RenderedInput> inputs;
    for (const auto& r : test.records) {
      if (!languages.contains(r.language)) continue;
      std::optional<std::string_view> translation;
      if (const auto it = translations.find(r.id); it != translations.end()) {
        translation = it->second;
      }
      records.push_back(&r);
      inputs.push_back(renderer(r, translation, ensemble.strategy));
    }
    if (records.empty()) continue;

    std::vector<std::vector<double>> per_model;
    per_model.reserve(ensemble.members.size());
    for (const auto& member : ensemble.members) {
      per_model.push_back(predictor(member, inputs));
      if (per_model.back().size() != inputs.size()) {
        throw Error(ErrorCategory::argument,
                    "member " + member + " returned " + std::to_string(per_model.back().size()) +
                        " scores for " + std::to_string(inputs.size()) + " inputs",
                    {member});
      }
    }
    const auto mean = average_predictions(per_model);
    for (std::size_t k = 0; k < records.size(); ++k) {
      double score = mean[k];
      if (options.clamp) score = std::clamp(score, kMinScore, kMaxScore);
      const bool inserted =
          out.emplace(records[k]->id, RoutedScore{records[k]->language, score, route}).second;
      if (!inserted) {
        throw Error(ErrorCategory::validation, "duplicate test id " + records[k]->id,
                    {records[k]->id});
      }
    }
  }
  return out;
}

void write_predictions(const std::filesystem::path& path, const RoutedPredictions& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string(), {path.string()});
  csv::write_row(out, {"id", "language", "score", "ensemble"});
  for (const auto& [id, p] : predictions) {
    csv::write_row(out, {id, p.language, csv::format_double(p.score), std::string(to_string(p.route))});
  }
}

std::unordered_map<std::string, double> read_prediction_scores(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw Error(ErrorCategory::parse, path.string() + ": empty prediction file");
  std::size_t id_col = rows[0].fields.size();
  std::size_t score_col = rows[0].fields.size();
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
    if (rows[0].fields[i] == "id") id_col = i;
    if (rows[0].fields[i] == "score") score_col = i;
  }
  if (id_col == rows[0].fields.size() || score_col == rows[0].fields.size()) {
    throw Error(ErrorCategory::parse, path.string() + ": header needs id and score columns");
  }
  std::unordered_map<std::string, double> scores;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = path.string() + ":" + std::to_string(rows[r].line);
    if (f.size() != rows[0].fields.size()) {
      throw Error(ErrorCategory::parse, where + ": wrong column count", {std::to_string(rows[r].line)});
    }
    double v = 0.0;
    const auto& text = f[score_col];
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw Error(ErrorCategory::parse, where + ": bad score '" + text + "'", {std::to_string(rows[r].line)});
    }
    if (!scores.emplace(f[id_col], v).second) {
      throw Error(ErrorCategory::validation, where + ": duplicate id " + f[id_col], {f[id_col]});
    }
  }
  return scores;
}

}  // namespace intimacy
