#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "intimacy/ensemble.hpp"
#include "intimacy/regressor.hpp"

namespace intimacy {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Everything a command needs. All randomness derives from `seed`:
///   split seed            = seed
///   training seed         = seed (single model, zero-shot cells)
///   ensemble member i     = member_seed(seed, i) = seed + i
struct RunConfig {
  std::string command;

  std::filesystem::path data;
  std::filesystem::path predictions;
  std::filesystem::path models;
  std::filesystem::path cache;
  std::filesystem::path out = "out";

  std::string backend = "none";     // none | mock:<jsonl> | http:<base-url>
  std::string backbone = "hashgram";  // hashgram | external:<adapter>
  std::string strategy = "original";
  bool routed = false;

  std::uint64_t seed = 42;
  int epochs = 3;
  int batch_size = 8;
  int max_sequence_length = 128;
  std::optional<double> learning_rate;  // backbone default when unset
  std::size_t ensemble_size = kDefaultEnsembleSize;
  double ratio = 0.7;

  bool clamp = false;
  bool fallback_original = false;

  std::vector<std::string> languages;  // known codes; empty = defaults
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
  std::vector<std::string> exclude;    // zero-shot columns; empty = derived from data
  std::size_t threads = 1;

  /// Learning rate actually used: the explicit value or the backbone default.
  double effective_learning_rate() const;
  TrainingConfig training_config() const;
  LanguageSet known_languages() const;
  LanguageSet seen_languages() const;
  LanguageSet unseen_languages() const;
};

/// Non-path settings, so runs differing only in where they read or write
/// serialize identically.
nlohmann::json settings_json(const RunConfig& config);

/// Flat `key = value` document accepted back through --config.
std::string to_config_file(const RunConfig& config);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Run record: command, settings, derived seeds, algorithm identifiers and
/// input checksums.
class Manifest {
 public:
  explicit Manifest(const RunConfig& config);

  /// Records the file's checksum under `role`; metadata() keeps only its
  /// base name, the written manifest keeps the full path too.
  void add_input(const std::string& role, const std::filesystem::path& path);
  void set_derived_seeds(nlohmann::json seeds);

  /// Path-free block embedded in every JSON artifact.
  nlohmann::json metadata() const;
  /// Writes manifest.json and run.conf into `dir`.
  void write(const std::filesystem::path& dir) const;

 private:
  RunConfig config_;
  nlohmann::json inputs_ = nlohmann::json::object();
  nlohmann::json input_paths_ = nlohmann::json::object();
  nlohmann::json seeds_ = nlohmann::json::object();
};

}  // namespace intimacy
