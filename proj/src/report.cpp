#include "intimacy/report.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "intimacy/csv.hpp"
#include "intimacy/error.hpp"

namespace intimacy {

namespace {

std::string r_text(const std::optional<double>& r) {
  return r ? csv::format_double(*r) : std::string("undefined");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCategory::io, "cannot create " + dir.string() + ": " + ec.message(), {dir.string()});
}

}  // namespace

nlohmann::json to_json(const MetricPair& m) {
  return {{"pearson_r", m.pearson_r ? nlohmann::json(*m.pearson_r) : nlohmann::json(nullptr)},
          {"mse", m.mse}};
}

nlohmann::json to_json(const GroupMetrics& g) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"n", g.n},
          {"languages", g.languages},
          {"pooled", g.pooled ? to_json(*g.pooled) : nlohmann::json(nullptr)},
          {"per_language_mean", {{"pearson_r", opt(g.macro_pearson_r)},
                                 {"mse", opt(g.macro_mse)},
                                 {"undefined_r_skipped", g.undefined_r_skipped}}}};
}

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json languages = nlohmann::json::object();
  for (const auto& [language, m] : report.per_language) {
    auto entry = to_json(m.metrics);
    entry["n"] = m.n;
    languages[language] = entry;
  }
  return {{"per_language", languages},
          {"seen", to_json(report.seen)},
          {"unseen", to_json(report.unseen)},
          {"overall", to_json(report.overall)}};
}

nlohmann::json to_json(const ZeroShotGrid& grid) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < kGridRows.size(); ++r) {
    nlohmann::json cells = nlohmann::json::object();
    for (std::size_t c = 0; c < grid.excluded_languages.size(); ++c) {
      const auto& cell = grid.cells[r][c];
      auto entry = to_json(cell.metrics);
      entry["train_records"] = cell.train_records;
      entry["eval_records"] = cell.eval_records;
      cells[grid.excluded_languages[c]] = entry;
    }
    rows.push_back({{"configuration", label(kGridRows[r])},
                    {"train", to_string(train_strategy(kGridRows[r]))},
                    {"eval", to_string(eval_strategy(kGridRows[r]))},
                    {"cells", cells}});
  }
  return {{"excluded_languages", grid.excluded_languages}, {"rows", rows}};
}

nlohmann::json to_json(const SummaryStats& s) {
  return {{"n", s.n}, {"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"std", s.std}};
}

nlohmann::json to_json(const Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"width", h.width},
          {"counts", h.counts}, {"below", h.below}, {"above", h.above}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string(), {path.string()});
  out << text;
  if (!out) throw Error(ErrorCategory::io, "write failed for " + path.string(), {path.string()});
}

void write_evaluation_report(const std::filesystem::path& dir, const EvaluationReport& report,
                             const nlohmann::json& metadata) {
  ensure_dir(dir);
  auto doc = to_json(report);
  doc["run"] = metadata;
  write_file(dir / "report.json", doc.dump(2) + "\n");

  std::ostringstream table;
  csv::write_row(table, {"scope", "name", "n", "pearson_r", "mse"});
  for (const auto& [language, m] : report.per_language) {
    csv::write_row(table, {"language", language, std::to_string(m.n), r_text(m.metrics.pearson_r),
                           csv::format_double(m.metrics.mse)});
  }
  const std::pair<const char*, const GroupMetrics*> groups[] = {
      {"seen", &report.seen}, {"unseen", &report.unseen}, {"overall", &report.overall}};
  for (const auto& [name, g] : groups) {
    if (g->pooled) {
      csv::write_row(table, {"pooled", name, std::to_string(g->n), r_text(g->pooled->pearson_r),
                             csv::format_double(g->pooled->mse)});
    }
    if (g->macro_mse) {
      csv::write_row(table, {"per-language-mean", name, std::to_string(g->languages),
                             r_text(g->macro_pearson_r), csv::format_double(*g->macro_mse)});
    }
  }
  write_file(dir / "metrics.csv", table.str());
}

void write_grid(const std::filesystem::path& dir, const ZeroShotGrid& grid,
                const nlohmann::json& metadata) {
  ensure_dir(dir);
  auto doc = to_json(grid);
  doc["run"] = metadata;
  write_file(dir / "grid.json", doc.dump(2) + "\n");

  std::ostringstream table;
  csv::write_row(table, {"configuration", "excluded_language", "pearson_r", "mse",
                         "train_records", "eval_records"});
  for (std::size_t r = 0; r < kGridRows.size(); ++r) {
    for (std::size_t c = 0; c < grid.excluded_languages.size(); ++c) {
      const auto& cell = grid.cells[r][c];
      csv::write_row(table, {label(kGridRows[r]), grid.excluded_languages[c],
                             r_text(cell.metrics.pearson_r), csv::format_double(cell.metrics.mse),
                             std::to_string(cell.train_records), std::to_string(cell.eval_records)});
    }
  }
  write_file(dir / "grid.csv", table.str());
}

void write_distribution_report(const std::filesystem::path& dir, const Dataset& gold,
                               const std::unordered_map<std::string, double>& predictions,
                               const nlohmann::json& metadata) {
  ensure_dir(dir);
  struct Series {
    std::vector<double> gold;
    std::vector<double> pred;
  };
  std::map<std::string, Series> by_language;
  Series all;
  std::vector<std::string> missing;

  std::ostringstream scatter;
  csv::write_row(scatter, {"id", "language", "gold", "prediction"});
  for (const auto& r : gold.records) {
    const auto it = predictions.find(r.id);
    if (it == predictions.end() || !r.score) {
      missing.push_back(r.id);
      continue;
    }
    for (Series* s : {&by_language[r.language], &all}) {
      s->gold.push_back(*r.score);
      s->pred.push_back(it->second);
    }
    csv::write_row(scatter, {r.id, r.language, csv::format_double(*r.score),
                             csv::format_double(it->second)});
  }
  if (!missing.empty()) {
    throw Error(ErrorCategory::coverage,
                "records without both a label and a prediction: " + join_limited(missing),
                missing);
  }

  std::ostringstream hist;
  csv::write_row(hist, {"language", "series", "bin_lo", "bin_hi", "count"});
  nlohmann::json summary = nlohmann::json::object();
  auto emit = [&](const std::string& name, const Series& s) {
    const Histogram hg = histogram(s.gold);
    const Histogram hp = histogram(s.pred);
    for (const auto& [series, h] : {std::pair{"gold", &hg}, std::pair{"prediction", &hp}}) {
      for (std::size_t b = 0; b < h->bins(); ++b) {
        csv::write_row(hist, {name, series, csv::format_double(h->bin_lo(b)),
                              csv::format_double(h->bin_lo(b + 1)), std::to_string(h->counts[b])});
      }
    }
    summary[name] = {{"gold", to_json(summarize(s.gold))},
                     {"prediction", to_json(summarize(s.pred))},
                     {"prediction_out_of_range", {{"below", hp.below}, {"above", hp.above}}}};
  };
  for (const auto& [language, s] : by_language) emit(language, s);
  emit("all", all);

  write_file(dir / "scatter.csv", scatter.str());
  write_file(dir / "histograms.csv", hist.str());
  nlohmann::json doc{{"summary", summary}, {"run", metadata}};
  write_file(dir / "summary.json", doc.dump(2) + "\n");
}

}  // namespace intimacy
