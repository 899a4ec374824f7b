#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace intimacy {

inline constexpr double kMinScore = 1.0;
inline constexpr double kMaxScore = 5.0;
inline constexpr std::string_view kEnglish = "en";

using LanguageSet = std::set<std::string, std::less<>>;

/// One tweet. `score` is the intimacy label when the record is annotated.
struct TweetRecord {
  std::string id;
  std::string text;
  std::string language;
  std::optional<double> score;

  bool operator==(const TweetRecord&) const = default;
};

enum class SplitTag { train, test, derived };

std::string_view to_string(SplitTag tag) noexcept;

struct Dataset {
  std::vector<TweetRecord> records;
  SplitTag split_tag = SplitTag::train;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  /// Distinct language codes in order of first appearance.
  std::vector<std::string> languages() const;
  bool all_labeled() const;
};

/// The ten task languages: six annotated in training plus four test-only.
const LanguageSet& default_known_languages();

/// Lowercases a code, and maps English language names ("Spanish") to their
/// two-letter codes so files that spell out languages load unchanged.
std::string normalize_language(std::string_view raw);

/// Checks the record and dataset invariants, throwing a validation error
/// naming the first offending record.
void validate(const Dataset& dataset, const LanguageSet& known_languages);

/// Reads a CSV with header columns text, label, language and an optional id
/// column. Rows without a label become unlabeled records.
Dataset load_dataset(const std::filesystem::path& path,
                     const LanguageSet& expected_languages = default_known_languages(),
                     SplitTag tag = SplitTag::train);

/// Writes `id,text,label,language`, readable by load_dataset.
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

struct SplitSpec {
  double ratio = 0.7;
  std::uint64_t seed = 0;
};

/// floor(ratio × n), guarded against the representation error of `ratio`.
std::size_t train_size(const SplitSpec& spec, std::size_t n);

/// Unstratified seeded shuffle, then the first train_size(n) records form the
/// training side. Both outputs keep the shuffled order.
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, const SplitSpec& spec);

/// (records of every other language, records of `excluded_language`), each in
/// input order. English cannot be excluded: it is the translation pivot.
std::pair<Dataset, Dataset> leave_one_out(const Dataset& dataset,
                                          std::string_view excluded_language);

using TokenCounter = std::function<std::size_t(std::string_view)>;

/// Number of maximal runs of non-whitespace ASCII bytes.
std::size_t whitespace_token_count(std::string_view text);

struct LanguageStats {
  std::string language;
  std::size_t count = 0;
  double avg_tokens = 0.0;
};

struct StatsTable {
  std::vector<LanguageStats> rows;  // first-appearance language order

  std::size_t total() const;
  const LanguageStats* find(std::string_view language) const;
};

StatsTable compute_statistics(const Dataset& dataset,
                              const TokenCounter& counter = whitespace_token_count);

/// CSV `language,count,avg_tokens` with averages printed to two decimals.
void write_statistics(const std::filesystem::path& path, const StatsTable& table);

}  // namespace intimacy
