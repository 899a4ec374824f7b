#include "intimacy/translation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "intimacy/error.hpp"

namespace intimacy {

namespace {

Error unavailable(std::string_view language, std::string_view text, const std::string& why) {
  return Error(ErrorCategory::translation_unavailable,
               "no translation for [" + std::string(language) + "] \"" + std::string(text) +
                   "\": " + why,
               {std::string(language), std::string(text)});
}

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io, "cannot open " + path.string(), {path.string()});
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      fn(obj.at("lang").get<std::string>(), obj.at("text").get<std::string>(),
         obj.at("translation").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCategory::parse,
                  path.string() + ":" + std::to_string(number) + ": " + e.what(),
                  {std::to_string(number)});
    }
  }
}

}  // namespace

bool is_english(std::string_view language) noexcept {
  return std::ranges::equal(language, kEnglish, [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == b;
  });
}

StaticLookupBackend::StaticLookupBackend(const std::filesystem::path& path) {
  for_each_jsonl(path, [&](std::string lang, std::string text, std::string translation) {
    add(std::move(lang), std::move(text), std::move(translation));
  });
}

void StaticLookupBackend::add(std::string language, std::string text, std::string translation) {
  table_.insert_or_assign({std::move(language), std::move(text)}, std::move(translation));
}

std::string StaticLookupBackend::translate(std::string_view text,
                                           std::string_view source_language) {
  ++calls_;
  const auto it = table_.find(std::pair{std::string(source_language), std::string(text)});
  if (it == table_.end()) throw unavailable(source_language, text, "not in lookup table");
  return it->second;
}

std::string NullBackend::translate(std::string_view text, std::string_view source_language) {
  throw unavailable(source_language, text, "no translation backend configured");
}

HttpTranslationBackend::HttpTranslationBackend(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

HttpTranslationBackend HttpTranslationBackend::from_environment(std::string base_url) {
  const char* key = std::getenv("TRANSLATE_API_KEY");
  return HttpTranslationBackend(std::move(base_url), key ? key : "");
}

std::string HttpTranslationBackend::translate(std::string_view text,
                                              std::string_view source_language) {
  // Split "scheme://host[:port]/prefix" into the client origin and path prefix.
  const auto scheme_end = base_url_.find("://");
  const auto path_start =
      base_url_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = base_url_.substr(0, path_start);
  const std::string prefix = path_start == std::string::npos ? "" : base_url_.substr(path_start);

  nlohmann::json body{{"q", text},
                      {"source", source_language},
                      {"target", "en"},
                      {"format", "text"}};
  if (!api_key_.empty()) body["api_key"] = api_key_;

  httplib::Client client(origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  const auto response = client.Post(prefix + "/translate", body.dump(), "application/json");
  if (!response) {
    throw unavailable(source_language, text,
                      "request failed: " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw unavailable(source_language, text, "HTTP status " + std::to_string(response->status));
  }
  try {
    return nlohmann::json::parse(response->body).at("translatedText").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw unavailable(source_language, text, std::string("malformed response: ") + e.what());
  }
}

TranslationCache::TranslationCache(std::filesystem::path backing_file)
    : backing_file_(std::move(backing_file)) {
  if (!backing_file_.empty() && std::filesystem::exists(backing_file_)) load(backing_file_);
}

std::optional<std::string> TranslationCache::find(std::string_view language,
                                                  std::string_view text) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(TranslationKey{std::string(language), std::string(text)});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string TranslationCache::insert(std::string_view language, std::string_view text,
                                     std::string translation) {
  std::unique_lock lock(mutex_);
  const auto [it, inserted] = entries_.try_emplace(
      TranslationKey{std::string(language), std::string(text)}, std::move(translation));
  return it->second;
}

std::size_t TranslationCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void TranslationCache::load(const std::filesystem::path& path) {
  for_each_jsonl(path, [&](std::string lang, std::string text, std::string translation) {
    insert(lang, text, std::move(translation));
  });
}

void TranslationCache::save() const {
  if (backing_file_.empty()) {
    throw Error(ErrorCategory::io, "translation cache has no backing file");
  }
  save(backing_file_);
}

void TranslationCache::save(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::io, "cannot write " + path.string(), {path.string()});
  for (const auto& [key, translation] : entries_) {
    out << nlohmann::json{{"lang", key.language}, {"text", key.text},
                          {"translation", translation}}
               .dump()
        << '\n';
  }
}

std::string translate(std::string_view text, std::string_view source_language,
                      TranslationBackend& backend, TranslationCache& cache) {
  if (text.empty()) throw Error(ErrorCategory::argument, "cannot translate empty text");
  if (is_english(source_language)) return std::string(text);
  if (auto hit = cache.find(source_language, text)) return *std::move(hit);

  std::string translated = backend.translate(text, source_language);
  if (translated.empty()) throw unavailable(source_language, text, "backend returned empty text");
  return cache.insert(source_language, text, std::move(translated));
}

TranslationMap translate_dataset(const Dataset& dataset, TranslationBackend& backend,
                                 TranslationCache& cache, MissingTranslation policy) {
  TranslationMap out;
  out.reserve(dataset.size());
  std::vector<std::string> failed;
  for (const auto& r : dataset.records) {
    try {
      out.emplace(r.id, translate(r.text, r.language, backend, cache));
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::translation_unavailable) throw;
      if (policy == MissingTranslation::fallback_original) {
        out.emplace(r.id, r.text);
      } else {
        failed.push_back(r.id);
      }
    }
  }
  if (!failed.empty()) {
    throw Error(ErrorCategory::translation_unavailable,
                std::to_string(failed.size()) + " record(s) could not be translated: " +
                    join_limited(failed),
                failed);
  }
  return out;
}

}  // namespace intimacy
