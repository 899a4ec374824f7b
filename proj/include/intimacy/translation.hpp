#pragma once

#include <atomic>
#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "intimacy/corpus.hpp"

namespace intimacy {

bool is_english(std::string_view language) noexcept;

/// Pluggable source-to-English translator. Implementations throw
/// Error{translation_unavailable} when they cannot produce a translation.
class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;
  virtual std::string name() const = 0;
  virtual std::string translate(std::string_view text, std::string_view source_language) = 0;
};

/// Serves translations from a fixed table; anything absent is unavailable.
/// Loaded from the same JSON-lines layout as the cache file.
class StaticLookupBackend final : public TranslationBackend {
 public:
  StaticLookupBackend() = default;
  explicit StaticLookupBackend(const std::filesystem::path& path);

  void add(std::string language, std::string text, std::string translation);
  std::string name() const override { return "static-lookup"; }
  std::string translate(std::string_view text, std::string_view source_language) override;

  std::size_t calls() const noexcept { return calls_.load(); }
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, std::string, std::less<>> table_;
  std::atomic<std::size_t> calls_{0};
};

/// Backend with no source: every lookup fails. Used when commands should be
/// served from the cache alone.
class NullBackend final : public TranslationBackend {
 public:
  std::string name() const override { return "none"; }
  std::string translate(std::string_view text, std::string_view source_language) override;
};

/// Client for a LibreTranslate-compatible HTTP endpoint:
/// POST {base}/translate with {"q","source","target":"en","format":"text","api_key"},
/// answered by {"translatedText": "..."}.
class HttpTranslationBackend final : public TranslationBackend {
 public:
  HttpTranslationBackend(std::string base_url, std::string api_key);
  /// Reads the key from TRANSLATE_API_KEY.
  static HttpTranslationBackend from_environment(std::string base_url);

  std::string name() const override { return "http:" + base_url_; }
  std::string translate(std::string_view text, std::string_view source_language) override;

 private:
  std::string base_url_;
  std::string api_key_;
};

struct TranslationKey {
  std::string language;
  std::string text;

  auto operator<=>(const TranslationKey&) const = default;
};

/// (language, exact text) → English. Keys are not normalized. A key, once
/// stored, keeps its first value. Reads may run concurrently; writes are
/// serialized.
class TranslationCache {
 public:
  TranslationCache() = default;
  /// Loads `backing_file` when it exists; save() writes back to it.
  explicit TranslationCache(std::filesystem::path backing_file);

  TranslationCache(const TranslationCache&) = delete;
  TranslationCache& operator=(const TranslationCache&) = delete;

  std::optional<std::string> find(std::string_view language, std::string_view text) const;
  /// Returns the value stored for the key, which is `translation` unless the
  /// key was already present.
  std::string insert(std::string_view language, std::string_view text, std::string translation);

  std::size_t size() const;
  const std::filesystem::path& backing_file() const noexcept { return backing_file_; }

  void load(const std::filesystem::path& path);
  void save() const;
  /// One JSON object per line with fields lang, text, translation, sorted by key.
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<TranslationKey, std::string> entries_;
  std::filesystem::path backing_file_;
};

/// English passes through untouched and never reaches the backend; otherwise
/// a cache hit is returned verbatim and a miss is delegated, then cached.
std::string translate(std::string_view text, std::string_view source_language,
                      TranslationBackend& backend, TranslationCache& cache);

enum class MissingTranslation {
  error,              // fail the batch
  fallback_original,  // substitute the original text
};

/// Record id → English text.
using TranslationMap = std::unordered_map<std::string, std::string>;

/// Translates every record. Under MissingTranslation::error a single
/// untranslatable record fails the whole batch with all failed ids listed.
TranslationMap translate_dataset(const Dataset& dataset, TranslationBackend& backend,
                                 TranslationCache& cache,
                                 MissingTranslation policy = MissingTranslation::error);

}  // namespace intimacy
