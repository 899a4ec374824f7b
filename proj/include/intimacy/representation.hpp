#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "intimacy/corpus.hpp"
#include "intimacy/translation.hpp"

namespace intimacy {

/// How a tweet is presented to a backbone: as written, as its English
/// translation, or both joined by the separator.
enum class Strategy { original, translated, joint };

std::string_view to_string(Strategy strategy) noexcept;
/// Accepts "original", "translated", "joint"; throws an argument error otherwise.
Strategy parse_strategy(std::string_view name);

/// Literal separator text; backbones see it as plain characters.
inline constexpr std::string_view kSeparator = "</s></s>";
/// Separator with its flanking spaces, as placed between the two halves.
inline constexpr std::string_view kJointDelimiter = " </s></s> ";

struct RenderedInput {
  std::string record_id;
  Strategy strategy = Strategy::original;
  std::string text;

  bool operator==(const RenderedInput&) const = default;
};

/// Renders one record. English records are their own translation. For the
/// translated and joint strategies a missing translation is a rendering error
/// unless `policy` falls back to the original text.
RenderedInput render(const TweetRecord& record, std::optional<std::string_view> translation,
                     Strategy strategy,
                     MissingTranslation policy = MissingTranslation::error);

/// Order-preserving batch form of render(); failures list every record id.
std::vector<RenderedInput> render_dataset(const Dataset& dataset,
                                          const TranslationMap& translations,
                                          Strategy strategy,
                                          MissingTranslation policy = MissingTranslation::error);

/// The (original, translated) halves of joint text, split at the first
/// delimiter; nullopt when the text has no delimiter.
std::optional<std::pair<std::string_view, std::string_view>> split_joint(std::string_view text);

/// Shortens `input` until `counter(text) <= max_len` by dropping trailing
/// whitespace-delimited words: for joint text from the translated half first,
/// then from the original half. The separator is never cut. `max_len` must be
/// at least 8.
RenderedInput truncate(const RenderedInput& input, std::size_t max_len,
                       const TokenCounter& counter = whitespace_token_count);

/// TSV dump `id<TAB>strategy<TAB>text` with a header row. Backslash, tab,
/// newline and carriage return in text are written as \\, \t, \n, \r.
void write_rendered_tsv(const std::filesystem::path& path, std::span<const RenderedInput> inputs);
std::vector<RenderedInput> read_rendered_tsv(const std::filesystem::path& path);

std::string escape_tsv_field(std::string_view field);
std::string unescape_tsv_field(std::string_view field);

}  // namespace intimacy
