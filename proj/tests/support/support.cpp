#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

#include "fixtures.hpp"
#include "intimacy/random.hpp"
#include "synthetic.hpp"

namespace intimacy::testing {

Dataset counts_fixture(const std::vector<std::pair<std::string, std::size_t>>& counts) {
  Dataset d;
  for (const auto& [language, n] : counts) {
    for (std::size_t i = 0; i < n; ++i) {
      d.records.push_back({language + "-" + std::to_string(i),
                           "tweet " + std::to_string(i) + " in " + language, language,
                           1.0 + static_cast<double>(i % 17) / 4.0});
    }
  }
  return d;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = std::filesystem::temp_directory_path() /
          ("intimacy-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(stamp) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

namespace {

std::string utf8(char32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xF0 | (cp >> 18));
    s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return s;
}

struct Script {
  char32_t first;
  char32_t last;
};

// Disjoint from Latin so that no pseudo-language shares characters with the
// English side of a joint input.
constexpr Script kScripts[] = {
    {0x03B1, 0x03C9},  // Greek
    {0x0430, 0x044F},  // Cyrillic
    {0x0561, 0x0586},  // Armenian
    {0x10D0, 0x10F0},  // Georgian
    {0x3041, 0x3096},  // Hiragana
    {0x05D0, 0x05EA},  // Hebrew
    {0x0E01, 0x0E2E},  // Thai
};

const std::vector<std::string>& english_fillers() {
  static const std::vector<std::string> words{
      "the",   "day",   "work",  "rain",   "city",  "train", "phone", "music", "game",
      "coffee", "street", "news", "movie", "school", "team", "food",  "window", "bus",
      "pencil", "market", "river", "light", "house", "road", "table", "night", "class",
      "store", "car",   "tree",  "song",   "green", "ticket", "sport", "cloud", "office"};
  return words;
}

constexpr const char* kEnglishSignal = "love";

std::string random_word(const Script& script, SeededRng& rng) {
  const std::size_t length = 3 + static_cast<std::size_t>(rng.below(4));
  std::string w;
  for (std::size_t i = 0; i < length; ++i) {
    w += utf8(script.first + static_cast<char32_t>(rng.below(script.last - script.first + 1)));
  }
  return w;
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) s += ' ';
    s += words[i];
  }
  return s;
}

}  // namespace

void SyntheticCorpus::fill(StaticLookupBackend& backend) const {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    backend.add(keys[i].language, keys[i].text, translated_texts[i]);
  }
}

SyntheticCorpus make_synthetic_corpus(std::uint64_t seed, const SyntheticOptions& options) {
  if (options.languages.size() > std::size(kScripts)) {
    throw std::invalid_argument("too many pseudo-languages");
  }
  SeededRng rng(seed);
  SyntheticCorpus corpus;
  const auto& fillers_en = english_fillers();

  auto emit = [&](const std::string& language, std::size_t index, const std::string& signal,
                  const std::vector<std::string>& fillers,
                  const std::vector<std::size_t>& filler_to_english) {
    const auto k = static_cast<std::size_t>(rng.below(4));
    std::vector<std::pair<std::string, std::string>> words;  // (original, english)
    for (std::size_t s = 0; s < k; ++s) words.emplace_back(signal, kEnglishSignal);
    while (words.size() < options.words_per_tweet) {
      const auto f = static_cast<std::size_t>(rng.below(fillers.size()));
      words.emplace_back(fillers[f], fillers_en[filler_to_english[f]]);
    }
    shuffle(words, rng);
    std::vector<std::string> original;
    std::vector<std::string> english;
    for (auto& [o, e] : words) {
      original.push_back(o);
      english.push_back(e);
    }
    const double label = 1.25 + static_cast<double>(k) + 0.5 * (rng.unit() - 0.5);
    TweetRecord record{language + "-" + std::to_string(index), join(original), language, label};
    const std::string translation = join(english);
    corpus.translations.emplace(record.id, translation);
    corpus.keys.push_back({language, record.text});
    corpus.translated_texts.push_back(translation);
    corpus.data.records.push_back(std::move(record));
  };

  for (std::size_t l = 0; l < options.languages.size(); ++l) {
    const auto& language = options.languages[l];
    const Script script = kScripts[l];
    std::vector<std::string> vocabulary;
    while (vocabulary.size() < 31) {
      auto w = random_word(script, rng);
      if (std::find(vocabulary.begin(), vocabulary.end(), w) == vocabulary.end()) {
        vocabulary.push_back(std::move(w));
      }
    }
    const std::string signal = vocabulary.back();
    vocabulary.pop_back();
    std::vector<std::size_t> to_english;
    for (std::size_t f = 0; f < vocabulary.size(); ++f) {
      to_english.push_back(static_cast<std::size_t>(rng.below(fillers_en.size())));
    }
    for (std::size_t i = 0; i < options.records_per_language; ++i) {
      emit(language, i, signal, vocabulary, to_english);
    }
  }
  if (options.include_english) {
    std::vector<std::size_t> identity(fillers_en.size());
    for (std::size_t f = 0; f < identity.size(); ++f) identity[f] = f;
    for (std::size_t i = 0; i < options.records_per_language; ++i) {
      emit("en", i, kEnglishSignal, fillers_en, identity);
    }
  }
  return corpus;
}

}  // namespace intimacy::testing
