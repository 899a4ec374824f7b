#include "intimacy/representation.hpp"

#include <fstream>

#include "intimacy/csv.hpp"
#include "intimacy/error.hpp"

namespace intimacy {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Removes the last whitespace-delimited word and any whitespace before it.
// Returns false when nothing is left to remove.
bool drop_last_word(std::string& s) {
  std::size_t end = s.size();
  while (end > 0 && is_space(s[end - 1])) --end;
  if (end == 0) {
    s.clear();
    return false;
  }
  std::size_t start = end;
  while (start > 0 && !is_space(s[start - 1])) --start;
  while (start > 0 && is_space(s[start - 1])) --start;
  s.erase(start);
  return true;
}

std::string join(std::string_view original, std::string_view translated) {
  std::string out;
  out.reserve(original.size() + kJointDelimiter.size() + translated.size());
  out.append(original).append(kJointDelimiter).append(translated);
  return out;
}

}  // namespace

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::original: return "original";
    case Strategy::translated: return "translated";
    case Strategy::joint: return "joint";
  }
  return "original";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "original") return Strategy::original;
  if (name == "translated") return Strategy::translated;
  if (name == "joint") return Strategy::joint;
  throw Error(ErrorCategory::argument,
              "unknown strategy '" + std::string(name) + "' (original|translated|joint)",
              {std::string(name)});
}

RenderedInput render(const TweetRecord& record, std::optional<std::string_view> translation,
                     Strategy strategy, MissingTranslation policy) {
  RenderedInput out{record.id, strategy, {}};
  if (strategy == Strategy::original) {
    out.text = record.text;
    return out;
  }

  std::string_view english;
  if (is_english(record.language)) {
    english = record.text;
  } else if (translation) {
    english = *translation;
  } else if (policy == MissingTranslation::fallback_original) {
    english = record.text;
  } else {
    throw Error(ErrorCategory::rendering,
                "record " + record.id + ": no translation available for " +
                    std::string(to_string(strategy)) + " rendering",
                {record.id});
  }

  if (strategy == Strategy::translated) {
    out.text = english;
    return out;
  }
  if (record.text.find(kSeparator) != std::string::npos ||
      english.find(kSeparator) != std::string_view::npos) {
    throw Error(ErrorCategory::rendering,
                "record " + record.id + ": text already contains the separator", {record.id});
  }
  out.text = join(record.text, english);
  return out;
}

std::vector<RenderedInput> render_dataset(const Dataset& dataset,
                                          const TranslationMap& translations, Strategy strategy,
                                          MissingTranslation policy) {
  std::vector<RenderedInput> out;
  out.reserve(dataset.size());
  std::vector<std::string> failed;
  for (const auto& r : dataset.records) {
    std::optional<std::string_view> translation;
    if (const auto it = translations.find(r.id); it != translations.end()) {
      translation = it->second;
    }
    try {
      out.push_back(render(r, translation, strategy, policy));
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::rendering) throw;
      failed.push_back(r.id);
    }
  }
  if (!failed.empty()) {
    throw Error(ErrorCategory::rendering,
                std::to_string(failed.size()) + " record(s) could not be rendered as " +
                    std::string(to_string(strategy)) + ": " + join_limited(failed),
                failed);
  }
  return out;
}

std::optional<std::pair<std::string_view, std::string_view>> split_joint(std::string_view text) {
  const auto pos = text.find(kJointDelimiter);
  if (pos == std::string_view::npos) return std::nullopt;
  return std::pair{text.substr(0, pos), text.substr(pos + kJointDelimiter.size())};
}

RenderedInput truncate(const RenderedInput& input, std::size_t max_len,
                       const TokenCounter& counter) {
  if (max_len < 8) {
    throw Error(ErrorCategory::argument,
                "max sequence length must be at least 8, got " + std::to_string(max_len));
  }
  if (counter(input.text) <= max_len) return input;

  RenderedInput out = input;
  const auto parts = input.strategy == Strategy::joint ? split_joint(input.text) : std::nullopt;
  if (!parts) {
    while (counter(out.text) > max_len && drop_last_word(out.text)) {
    }
    return out;
  }

  std::string original(parts->first);
  std::string translated(parts->second);
  auto over = [&] { return counter(join(original, translated)) > max_len; };
  while (over() && drop_last_word(translated)) {
  }
  while (over() && drop_last_word(original)) {
  }
  out.text = join(original, translated);
  return out;
}

std::string escape_tsv_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (const char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_tsv_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\' || i + 1 == field.size()) {
      out += field[i];
      continue;
    }
    switch (field[++i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default:
        out += '\\';
        out += field[i];
    }
  }
  return out;
}

void write_rendered_tsv(const std::filesystem::path& path, std::span<const RenderedInput> inputs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string(), {path.string()});
  out << "id\tstrategy\ttext\n";
  for (const auto& in : inputs) {
    out << escape_tsv_field(in.record_id) << '\t' << to_string(in.strategy) << '\t'
        << escape_tsv_field(in.text) << '\n';
  }
}

std::vector<RenderedInput> read_rendered_tsv(const std::filesystem::path& path) {
  const std::string content = csv::read_text(path);
  std::vector<RenderedInput> inputs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) continue;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      throw Error(ErrorCategory::parse,
                  path.string() + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields",
                  {std::to_string(line_no)});
    }
    inputs.push_back({unescape_tsv_field(line.substr(0, t1)),
                      parse_strategy(line.substr(t1 + 1, t2 - t1 - 1)),
                      unescape_tsv_field(line.substr(t2 + 1))});
  }
  return inputs;
}

}  // namespace intimacy
