#include "intimacy/evaluation.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "intimacy/error.hpp"

namespace intimacy {

namespace {

struct Series {
  std::vector<double> pred;
  std::vector<double> gold;
};

GroupMetrics aggregate(const Series& pooled, const std::vector<const LanguageMetrics*>& members) {
  GroupMetrics g;
  g.n = pooled.pred.size();
  g.languages = members.size();
  if (g.n > 0) g.pooled = score(pooled.pred, pooled.gold);
  double r_sum = 0.0;
  double mse_sum = 0.0;
  std::size_t r_count = 0;
  for (const auto* m : members) {
    mse_sum += m->metrics.mse;
    if (m->metrics.pearson_r) {
      r_sum += *m->metrics.pearson_r;
      ++r_count;
    } else {
      ++g.undefined_r_skipped;
    }
  }
  if (!members.empty()) g.macro_mse = mse_sum / static_cast<double>(members.size());
  if (r_count > 0) g.macro_pearson_r = r_sum / static_cast<double>(r_count);
  return g;
}

}  // namespace

EvaluationReport evaluate_by_language(const std::unordered_map<std::string, double>& predictions,
                                      const Dataset& gold, const LanguageSet& seen,
                                      const LanguageSet& unseen) {
  std::vector<std::string> missing;
  for (const auto& r : gold.records) {
    if (!r.score) {
      throw Error(ErrorCategory::validation, "gold record " + r.id + " has no label", {r.id});
    }
    if (!predictions.contains(r.id)) missing.push_back(r.id);
  }
  if (!missing.empty()) {
    throw Error(ErrorCategory::coverage,
                std::to_string(missing.size()) + " gold record(s) lack predictions: " +
                    join_limited(missing),
                missing);
  }

  std::map<std::string, Series> by_language;
  Series seen_series;
  Series unseen_series;
  Series all;
  for (const auto& r : gold.records) {
    const double p = predictions.at(r.id);
    for (Series* s : {&by_language[r.language], &all}) {
      s->pred.push_back(p);
      s->gold.push_back(*r.score);
    }
    Series* group = seen.contains(r.language)     ? &seen_series
                    : unseen.contains(r.language) ? &unseen_series
                                                  : nullptr;
    if (group) {
      group->pred.push_back(p);
      group->gold.push_back(*r.score);
    }
  }

  EvaluationReport report;
  std::vector<const LanguageMetrics*> seen_members;
  std::vector<const LanguageMetrics*> unseen_members;
  std::vector<const LanguageMetrics*> all_members;
  for (const auto& [language, series] : by_language) {
    auto& entry = report.per_language[language];
    entry.n = series.pred.size();
    entry.metrics = score(series.pred, series.gold);
    all_members.push_back(&entry);
    if (seen.contains(language)) seen_members.push_back(&entry);
    if (unseen.contains(language)) unseen_members.push_back(&entry);
  }
  report.seen = aggregate(seen_series, seen_members);
  report.unseen = aggregate(unseen_series, unseen_members);
  report.overall = aggregate(all, all_members);
  return report;
}

Strategy train_strategy(GridRow row) noexcept {
  switch (row) {
    case GridRow::original_original:
    case GridRow::original_translated: return Strategy::original;
    case GridRow::translated_translated:
    case GridRow::translated_original: return Strategy::translated;
    case GridRow::joint_joint: return Strategy::joint;
  }
  return Strategy::original;
}

Strategy eval_strategy(GridRow row) noexcept {
  switch (row) {
    case GridRow::original_original:
    case GridRow::translated_original: return Strategy::original;
    case GridRow::original_translated:
    case GridRow::translated_translated: return Strategy::translated;
    case GridRow::joint_joint: return Strategy::joint;
  }
  return Strategy::original;
}

std::string label(GridRow row) {
  return "train:" + std::string(to_string(train_strategy(row))) + "/eval:" +
         std::string(to_string(eval_strategy(row)));
}

const GridCell& ZeroShotGrid::at(GridRow row, std::string_view language) const {
  for (std::size_t c = 0; c < excluded_languages.size(); ++c) {
    if (excluded_languages[c] == language) return cells[static_cast<std::size_t>(row)][c];
  }
  throw Error(ErrorCategory::argument,
              "language '" + std::string(language) + "' is not a grid column",
              {std::string(language)});
}

namespace {

std::vector<double> labels_of(const Dataset& d) {
  std::vector<double> labels;
  labels.reserve(d.size());
  for (const auto& r : d.records) {
    if (!r.score) {
      throw Error(ErrorCategory::validation, "record " + r.id + " has no label", {r.id});
    }
    labels.push_back(*r.score);
  }
  return labels;
}

GridCell run_cell(GridRow row, const std::string& excluded, const Dataset& train_side,
                  const Dataset& eval_side, const TranslationMap& translations,
                  const TrainingConfig& config, const GridOptions& options) {
  const auto train_inputs =
      render_dataset(train_side, translations, train_strategy(row), options.policy);
  const auto eval_inputs =
      render_dataset(eval_side, translations, eval_strategy(row), options.policy);
  const auto train_labels = labels_of(train_side);
  const auto eval_labels = labels_of(eval_side);

  TrainOptions train_options;
  train_options.features = options.features;
  if (options.auditor) {
    train_options.observer = [&](int, std::size_t, std::span<const std::size_t> rows) {
      std::vector<std::string> ids;
      ids.reserve(rows.size());
      for (const auto i : rows) ids.push_back(train_inputs[i].record_id);
      options.auditor(row, excluded, ids);
    };
  }
  const auto model = train(train_inputs, train_labels, config, train_options);
  const auto predictions = predict(model, eval_inputs);
  return {score(predictions, eval_labels), train_side.size(), eval_side.size()};
}

}  // namespace

ZeroShotGrid run_zero_shot_grid(const Dataset& train, const TranslationMap& translations,
                                const TrainingConfig& config,
                                const std::vector<std::string>& excludable,
                                const GridOptions& options) {
  config.validate();
  ZeroShotGrid grid;
  grid.excluded_languages = excludable;

  std::vector<std::pair<Dataset, Dataset>> partitions;
  partitions.reserve(excludable.size());
  for (const auto& language : excludable) partitions.push_back(leave_one_out(train, language));
  for (auto& row : grid.cells) row.resize(excludable.size());

  const std::size_t total = kGridRows.size() * excludable.size();
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task; (task = next++) < total;) {
      const std::size_t r = task / excludable.size();
      const std::size_t c = task % excludable.size();
      const GridRow row = kGridRows[r];
      try {
        grid.cells[r][c] = run_cell(row, excludable[c], partitions[c].first,
                                    partitions[c].second, translations, config, options);
      } catch (const Error& e) {
        errors[task] = std::make_exception_ptr(
            Error(e.category(), "grid cell [" + label(row) + ", " + excludable[c] + "]: " + e.what(),
                  e.subjects()));
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(total, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return grid;
}

}  // namespace intimacy
