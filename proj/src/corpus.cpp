#include "intimacy/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "intimacy/csv.hpp"
#include "intimacy/error.hpp"
#include "intimacy/random.hpp"

namespace intimacy {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::string_view to_string(SplitTag tag) noexcept {
  switch (tag) {
    case SplitTag::train: return "train";
    case SplitTag::test: return "test";
    case SplitTag::derived: return "derived";
  }
  return "derived";
}

std::vector<std::string> Dataset::languages() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.language).second) out.push_back(r.language);
  }
  return out;
}

bool Dataset::all_labeled() const {
  return std::all_of(records.begin(), records.end(),
                     [](const TweetRecord& r) { return r.score.has_value(); });
}

const LanguageSet& default_known_languages() {
  static const LanguageSet known{"en", "es", "it", "pt", "fr", "zh", "hi", "ar", "nl", "ko"};
  return known;
}

std::string normalize_language(std::string_view raw) {
  static const std::map<std::string, std::string, std::less<>> names{
      {"english", "en"}, {"spanish", "es"}, {"italian", "it"}, {"portuguese", "pt"},
      {"french", "fr"},  {"chinese", "zh"}, {"hindi", "hi"},   {"arabic", "ar"},
      {"dutch", "nl"},   {"korean", "ko"},
  };
  std::string code = lower(trim(raw));
  if (const auto it = names.find(code); it != names.end()) return it->second;
  return code;
}

void validate(const Dataset& dataset, const LanguageSet& known_languages) {
  std::unordered_set<std::string> ids;
  for (const auto& r : dataset.records) {
    if (trim(r.text).empty()) {
      throw Error(ErrorCategory::validation, "record " + r.id + ": empty text", {r.id});
    }
    if (r.score && !(*r.score >= kMinScore && *r.score <= kMaxScore)) {
      throw Error(ErrorCategory::validation,
                  "record " + r.id + ": score " + csv::format_double(*r.score) +
                      " outside [1, 5]",
                  {r.id});
    }
    if (!known_languages.contains(r.language)) {
      throw Error(ErrorCategory::validation,
                  "record " + r.id + ": unknown language code '" + r.language + "'",
                  {r.language});
    }
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCategory::validation, "duplicate record id " + r.id, {r.id});
    }
  }
}

Dataset load_dataset(const std::filesystem::path& path, const LanguageSet& expected_languages,
                     SplitTag tag) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) {
    throw Error(ErrorCategory::parse, path.string() + ": missing header row", {"1"});
  }

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
    column.emplace(lower(trim(rows[0].fields[i])), i);
  }
  for (const char* required : {"text", "label", "language"}) {
    if (!column.contains(required)) {
      throw Error(ErrorCategory::parse,
                  path.string() + ": header lacks column '" + required + "'", {"1"});
    }
  }
  const std::size_t width = rows[0].fields.size();
  const std::size_t text_col = column["text"];
  const std::size_t label_col = column["label"];
  const std::size_t lang_col = column["language"];
  const auto id_col = column.find("id");

  Dataset dataset;
  dataset.split_tag = tag;
  dataset.records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "row " + std::to_string(r) + " (line " + std::to_string(row.line) + ")";
    if (row.fields.size() != width) {
      throw Error(ErrorCategory::parse,
                  where + ": expected " + std::to_string(width) + " columns, found " +
                      std::to_string(row.fields.size()),
                  {std::to_string(r)});
    }
    TweetRecord record;
    record.id = id_col != column.end() ? std::string(trim(row.fields[id_col->second]))
                                       : std::to_string(r - 1);
    record.text = row.fields[text_col];
    record.language = normalize_language(row.fields[lang_col]);

    const std::string_view label = trim(row.fields[label_col]);
    if (!label.empty()) {
      const auto value = parse_number(label);
      if (!value) {
        throw Error(ErrorCategory::parse,
                    where + ": label '" + std::string(label) + "' is not a number",
                    {std::to_string(r)});
      }
      if (!(*value >= kMinScore && *value <= kMaxScore)) {
        throw Error(ErrorCategory::validation,
                    where + ": label " + std::string(label) + " outside [1, 5]",
                    {std::to_string(r)});
      }
      record.score = *value;
    }
    if (trim(record.text).empty()) {
      throw Error(ErrorCategory::validation, where + ": empty text", {std::to_string(r)});
    }
    if (!expected_languages.contains(record.language)) {
      throw Error(ErrorCategory::validation,
                  where + ": unknown language code '" + record.language + "'",
                  {record.language});
    }
    dataset.records.push_back(std::move(record));
  }
  validate(dataset, expected_languages);
  return dataset;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string(), {path.string()});
  csv::write_row(out, {"id", "text", "label", "language"});
  for (const auto& r : dataset.records) {
    csv::write_row(out, {r.id, r.text, r.score ? csv::format_double(*r.score) : std::string(),
                         r.language});
  }
  if (!out) throw Error(ErrorCategory::io, "write failed for " + path.string(), {path.string()});
}

std::size_t train_size(const SplitSpec& spec, std::size_t n) {
  if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) {
    throw Error(ErrorCategory::argument,
                "split ratio must lie in (0, 1), got " + csv::format_double(spec.ratio));
  }
  const double exact = spec.ratio * static_cast<double>(n);
  // 0.7 * 10 may land a hair below 7; absorb that before flooring.
  return std::min(n, static_cast<std::size_t>(std::floor(exact + 1e-9 * std::max(1.0, exact))));
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, const SplitSpec& spec) {
  const std::size_t n_train = train_size(spec, dataset.size());
  if (dataset.size() < 2) {
    throw Error(ErrorCategory::argument, "cannot split fewer than 2 records");
  }
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SeededRng rng(spec.seed);
  shuffle(order, rng);

  std::pair<Dataset, Dataset> parts;
  parts.first.split_tag = parts.second.split_tag = SplitTag::derived;
  parts.first.records.reserve(n_train);
  parts.second.records.reserve(dataset.size() - n_train);
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& side = k < n_train ? parts.first : parts.second;
    side.records.push_back(dataset.records[order[k]]);
  }
  return parts;
}

std::pair<Dataset, Dataset> leave_one_out(const Dataset& dataset,
                                          std::string_view excluded_language) {
  if (excluded_language == kEnglish) {
    throw Error(ErrorCategory::protocol,
                "English is the translation pivot and cannot be excluded", {"en"});
  }
  std::pair<Dataset, Dataset> parts;
  parts.first.split_tag = parts.second.split_tag = SplitTag::derived;
  for (const auto& r : dataset.records) {
    (r.language == excluded_language ? parts.second : parts.first).records.push_back(r);
  }
  if (parts.second.empty()) {
    throw Error(ErrorCategory::argument,
                "language '" + std::string(excluded_language) + "' not present in dataset",
                {std::string(excluded_language)});
  }
  return parts;
}

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (const char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::size_t StatsTable::total() const {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.count;
  return n;
}

const LanguageStats* StatsTable::find(std::string_view language) const {
  for (const auto& row : rows) {
    if (row.language == language) return &row;
  }
  return nullptr;
}

StatsTable compute_statistics(const Dataset& dataset, const TokenCounter& counter) {
  StatsTable table;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<double> token_sums;
  for (const auto& r : dataset.records) {
    auto [it, inserted] = index.emplace(r.language, table.rows.size());
    if (inserted) {
      table.rows.push_back({r.language, 0, 0.0});
      token_sums.push_back(0.0);
    }
    table.rows[it->second].count += 1;
    token_sums[it->second] += static_cast<double>(counter(r.text));
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    table.rows[i].avg_tokens = token_sums[i] / static_cast<double>(table.rows[i].count);
  }
  return table;
}

void write_statistics(const std::filesystem::path& path, const StatsTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string(), {path.string()});
  csv::write_row(out, {"language", "count", "avg_tokens"});
  for (const auto& row : table.rows) {
    csv::write_row(out, {row.language, std::to_string(row.count),
                         csv::format_fixed(row.avg_tokens, 2)});
  }
}

}  // namespace intimacy
