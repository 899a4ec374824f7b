#pragma once

#include <filesystem>
#include <unordered_map>

#include <json.hpp>

#include "intimacy/corpus.hpp"
#include "intimacy/evaluation.hpp"
#include "intimacy/metrics.hpp"

namespace intimacy {

// Undefined correlations serialize as null.
nlohmann::json to_json(const MetricPair& metrics);
nlohmann::json to_json(const GroupMetrics& group);
nlohmann::json to_json(const EvaluationReport& report);
nlohmann::json to_json(const ZeroShotGrid& grid);
nlohmann::json to_json(const SummaryStats& stats);
nlohmann::json to_json(const Histogram& histogram);

/// Writes `text` to `path` exactly, throwing an io error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

/// report.json (metrics plus `metadata` under "run") and metrics.csv.
void write_evaluation_report(const std::filesystem::path& dir, const EvaluationReport& report,
                             const nlohmann::json& metadata);

/// grid.json and grid.csv with one line per (row, excluded language).
void write_grid(const std::filesystem::path& dir, const ZeroShotGrid& grid,
                const nlohmann::json& metadata);

/// Distribution artifacts for gold labels against predictions:
///   histograms.csv  per-language and overall counts in 0.25-wide bins over [0.5, 5.5]
///   scatter.csv     (id, language, gold, prediction) pairs
///   summary.json    min/max/mean/population std of gold and predictions
void write_distribution_report(const std::filesystem::path& dir, const Dataset& gold,
                               const std::unordered_map<std::string, double>& predictions,
                               const nlohmann::json& metadata);

}  // namespace intimacy
