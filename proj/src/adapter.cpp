#include <charconv>
#include <cmath>
#include <cstdlib>
#include <unordered_set>

#include "intimacy/csv.hpp"
#include "intimacy/error.hpp"
#include "intimacy/regressor.hpp"

namespace intimacy {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::optional<double> parse_score(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

std::unordered_map<std::string, double> read_adapter_output(
    const std::filesystem::path& output_csv, std::span<const std::string> expected_ids) {
  std::vector<csv::Row> rows;
  try {
    rows = csv::read_file(output_csv);
  } catch (const Error& e) {
    throw Error(ErrorCategory::adapter_contract, std::string("adapter output: ") + e.what());
  }
  if (rows.empty() || rows[0].fields != std::vector<std::string>{"id", "score"}) {
    throw Error(ErrorCategory::adapter_contract, "adapter output must start with header id,score",
                {"1"});
  }

  const std::unordered_set<std::string> expected(expected_ids.begin(), expected_ids.end());
  std::unordered_map<std::string, double> scores;
  std::vector<std::string> problems;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "line " + std::to_string(row.line);
    if (row.fields.size() != 2) {
      problems.push_back(where + ": expected 2 fields");
      continue;
    }
    const auto& id = row.fields[0];
    const auto value = parse_score(row.fields[1]);
    if (!value) {
      problems.push_back(where + ": non-numeric score '" + row.fields[1] + "'");
    } else if (!expected.contains(id)) {
      problems.push_back(where + ": unexpected id " + id);
    } else if (!scores.emplace(id, *value).second) {
      problems.push_back(where + ": duplicate id " + id);
    }
  }
  for (const auto& id : expected_ids) {
    if (!scores.contains(id)) problems.push_back("missing id " + id);
  }
  if (!problems.empty()) {
    throw Error(ErrorCategory::adapter_contract,
                "adapter output violates the id,score contract: " + join_limited(problems),
                problems);
  }
  return scores;
}

std::unordered_map<std::string, double> external_adapter_predict(
    const std::filesystem::path& adapter, const std::filesystem::path& model_dir,
    const std::filesystem::path& inputs_tsv, const std::filesystem::path& output_csv) {
  const auto inputs = read_rendered_tsv(inputs_tsv);
  std::vector<std::string> ids;
  ids.reserve(inputs.size());
  for (const auto& in : inputs) ids.push_back(in.record_id);

  std::filesystem::remove(output_csv);
  const std::string command = "INTIMACY_MODEL_DIR=" + shell_quote(model_dir.string()) + " " +
                              shell_quote(adapter.string()) + " " +
                              shell_quote(inputs_tsv.string()) + " " +
                              shell_quote(output_csv.string());
  const int status = std::system(command.c_str());
  if (status != 0) {
    throw Error(ErrorCategory::adapter_contract,
                "adapter " + adapter.string() + " exited with status " + std::to_string(status),
                {adapter.string()});
  }
  if (!std::filesystem::exists(output_csv)) {
    throw Error(ErrorCategory::adapter_contract,
                "adapter " + adapter.string() + " wrote no output", {adapter.string()});
  }
  return read_adapter_output(output_csv, ids);
}

std::vector<double> predict_external(const std::filesystem::path& adapter,
                                     const std::filesystem::path& model_dir,
                                     std::span<const RenderedInput> inputs,
                                     const std::filesystem::path& work_dir) {
  std::filesystem::create_directories(work_dir);
  const auto tsv = work_dir / "adapter-inputs.tsv";
  const auto out = work_dir / "adapter-output.csv";
  write_rendered_tsv(tsv, inputs);
  const auto scores = external_adapter_predict(adapter, model_dir, tsv, out);
  std::vector<double> ordered;
  ordered.reserve(inputs.size());
  for (const auto& in : inputs) ordered.push_back(scores.at(in.record_id));
  return ordered;
}

}  // namespace intimacy
