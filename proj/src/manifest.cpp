#include "intimacy/manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "intimacy/csv.hpp"
#include "intimacy/error.hpp"
#include "intimacy/hashing.hpp"
#include "intimacy/random.hpp"
#include "intimacy/report.hpp"

namespace intimacy {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

LanguageSet to_set(const std::vector<std::string>& codes, const LanguageSet& fallback) {
  if (codes.empty()) return fallback;
  LanguageSet out;
  for (const auto& c : codes) out.insert(normalize_language(c));
  return out;
}

}  // namespace

double RunConfig::effective_learning_rate() const {
  if (learning_rate) return *learning_rate;
  return backbone == kHashGramBackboneId ? kReferenceLearningRate : TrainingConfig{}.learning_rate;
}

TrainingConfig RunConfig::training_config() const {
  TrainingConfig c;
  c.epochs = epochs;
  c.batch_size = batch_size;
  c.max_sequence_length = max_sequence_length;
  c.learning_rate = effective_learning_rate();
  c.seed = seed;
  return c;
}

LanguageSet RunConfig::known_languages() const { return to_set(languages, default_known_languages()); }
LanguageSet RunConfig::seen_languages() const { return to_set(seen, default_seen_languages()); }
LanguageSet RunConfig::unseen_languages() const { return to_set(unseen, default_unseen_languages()); }

nlohmann::json settings_json(const RunConfig& c) {
  auto set_json = [](const LanguageSet& s) { return std::vector<std::string>(s.begin(), s.end()); };
  return {{"backend", c.backend},
          {"backbone", c.backbone},
          {"strategy", c.strategy},
          {"routed", c.routed},
          {"seed", c.seed},
          {"training",
           {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"max_sequence_length", c.max_sequence_length},
            {"learning_rate", c.effective_learning_rate()}}},
          {"ensemble_size", c.ensemble_size},
          {"ratio", c.ratio},
          {"clamp", c.clamp},
          {"fallback_original", c.fallback_original},
          {"languages", set_json(c.known_languages())},
          {"seen", set_json(c.seen_languages())},
          {"unseen", set_json(c.unseen_languages())},
          {"exclude", c.exclude}};
}

std::string to_config_file(const RunConfig& c) {
  std::ostringstream out;
  out << "# intimacy run configuration; replay with --config\n";
  auto path = [&](const char* key, const std::filesystem::path& p) {
    if (!p.empty()) out << key << " = " << p.string() << '\n';
  };
  path("data", c.data);
  path("predictions", c.predictions);
  path("models", c.models);
  path("cache", c.cache);
  path("out", c.out);
  out << "backend = " << c.backend << '\n'
      << "backbone = " << c.backbone << '\n'
      << "strategy = " << c.strategy << '\n'
      << "routed = " << (c.routed ? "true" : "false") << '\n'
      << "seed = " << c.seed << '\n'
      << "epochs = " << c.epochs << '\n'
      << "batch-size = " << c.batch_size << '\n'
      << "max-len = " << c.max_sequence_length << '\n'
      << "lr = " << csv::format_double(c.effective_learning_rate()) << '\n'
      << "ensemble-size = " << c.ensemble_size << '\n'
      << "ratio = " << csv::format_double(c.ratio) << '\n'
      << "clamp = " << (c.clamp ? "true" : "false") << '\n'
      << "fallback-original = " << (c.fallback_original ? "true" : "false") << '\n'
      << "threads = " << c.threads << '\n';
  if (!c.languages.empty()) out << "languages = " << join(c.languages) << '\n';
  if (!c.seen.empty()) out << "seen = " << join(c.seen) << '\n';
  if (!c.unseen.empty()) out << "unseen = " << join(c.unseen) << '\n';
  if (!c.exclude.empty()) out << "exclude = " << join(c.exclude) << '\n';
  return out.str();
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw Error(ErrorCategory::io, "SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(csv::read_text(path)); }

Manifest::Manifest(const RunConfig& config) : config_(config) {}

void Manifest::add_input(const std::string& role, const std::filesystem::path& path) {
  inputs_[role] = {{"file", path.filename().string()}, {"sha256", sha256_file(path)}};
  input_paths_[role] = path.string();
}

void Manifest::set_derived_seeds(nlohmann::json seeds) { seeds_ = std::move(seeds); }

nlohmann::json Manifest::metadata() const {
  return {{"tool", "intimacy"},
          {"version", kToolVersion},
          {"command", config_.command},
          {"settings", settings_json(config_)},
          {"seeds", seeds_},
          {"algorithms",
           {{"shuffle", kShuffleAlgorithm},
            {"feature_hash", kFeatureHashAlgorithm},
            {"optimizer", "minibatch-gd/mse"}}},
          {"inputs", inputs_}};
}

void Manifest::write(const std::filesystem::path& dir) const {
  auto doc = metadata();
  doc["paths"] = input_paths_;
  doc["paths"]["out"] = config_.out.string();
  write_file(dir / "manifest.json", doc.dump(2) + "\n");
  write_file(dir / "run.conf", to_config_file(config_));
}

}  // namespace intimacy
