#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "intimacy/representation.hpp"

namespace intimacy {

inline constexpr std::string_view kHashGramBackboneId = "hashgram";
/// Step size for the hashed n-gram backbone. The 4e-5 default below is sized
/// for transformer fine-tuning and barely moves a linear model.
inline constexpr double kReferenceLearningRate = 0.05;

struct TrainingConfig {
  int epochs = 3;
  int batch_size = 8;
  int max_sequence_length = 128;
  double learning_rate = 4e-5;
  std::uint64_t seed = 0;

  /// Defaults with the learning rate replaced by kReferenceLearningRate.
  static TrainingConfig for_reference_backbone();
  void validate() const;

  bool operator==(const TrainingConfig&) const = default;
};

struct HashGramOptions {
  Eigen::Index feature_dim = Eigen::Index{1} << 16;
  int min_n = 1;
  int max_n = 3;
  std::uint64_t hash_seed = 0;

  bool operator==(const HashGramOptions&) const = default;
};

using SparseFeatures = Eigen::SparseVector<double>;

/// Linear regressor over hashed character n-grams.
///
/// Text is split into UTF-8 code points; every n-gram with min_n <= n <= max_n
/// is hashed with FNV-1a 64 (the n-gram length byte first, then its UTF-8
/// bytes; seed XOR-ed into the offset basis) and bucketed modulo feature_dim.
/// Bucket counts are scaled to unit L2 norm. prediction = w·x + b.
class HashGramModel {
 public:
  explicit HashGramModel(HashGramOptions options = {});

  const HashGramOptions& options() const noexcept { return options_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  Eigen::VectorXd& weights() noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  void set_bias(double bias) noexcept { bias_ = bias; }

  SparseFeatures featurize(std::string_view text) const;
  double predict(const SparseFeatures& x) const;

  struct Gradient {
    Eigen::VectorXd weights;
    double bias = 0.0;
  };

  /// Mean squared residual over the selected rows.
  double loss(std::span<const SparseFeatures> features, std::span<const double> labels,
              std::span<const std::size_t> rows) const;
  /// Analytic gradient of loss() with respect to (weights, bias).
  Gradient gradient(std::span<const SparseFeatures> features, std::span<const double> labels,
                    std::span<const std::size_t> rows) const;
  /// One gradient-descent step on loss(), touching only active buckets.
  void step(std::span<const SparseFeatures> features, std::span<const double> labels,
            std::span<const std::size_t> rows, double learning_rate);

 private:
  HashGramOptions options_;
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
};

/// A trained model with the configuration that produced it.
struct ModelHandle {
  std::string backbone_id{kHashGramBackboneId};
  Strategy strategy = Strategy::original;
  TrainingConfig config;
  HashGramModel model;
};

struct TrainingTrace {
  std::vector<double> batch_losses;       // loss of each batch before its step
  std::vector<double> epoch_mean_losses;  // mean of batch_losses per epoch
};

/// Sees the input rows of every training batch, in training order.
using BatchObserver =
    std::function<void(int epoch, std::size_t batch, std::span<const std::size_t> rows)>;

struct TrainOptions {
  std::string backbone_id{kHashGramBackboneId};
  HashGramOptions features;
  BatchObserver observer;
  TrainingTrace* trace = nullptr;
};

/// Mini-batch gradient descent on mean squared error for exactly
/// `config.epochs` passes. Each epoch visits the rows in a fresh seeded
/// permutation; the last batch of an epoch may be short. The bias starts at
/// the label mean and the weights at zero. Inputs are truncated to
/// `config.max_sequence_length` whitespace tokens before featurization.
ModelHandle train(std::span<const RenderedInput> inputs, std::span<const double> labels,
                  const TrainingConfig& config, const TrainOptions& options = {});

struct PredictOptions {
  bool clamp = false;  // clamp scores into [1, 5]
};

std::vector<double> predict(const ModelHandle& handle, std::span<const RenderedInput> inputs,
                            const PredictOptions& options = {});

/// Self-describing blob: a magic line, a JSON header line (backbone, strategy,
/// config, featurizer), then little-endian binary bias and non-zero weights.
void save_model(const ModelHandle& handle, const std::filesystem::path& path);
ModelHandle load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// External backbones.
//
// An adapter is an executable invoked as `<adapter> <inputs.tsv> <output.csv>`
// with INTIMACY_MODEL_DIR naming the model directory. It reads the rendered
// TSV and must write a CSV with header `id,score` holding every input id
// exactly once.

/// Parses and checks adapter output against the ids that were sent.
std::unordered_map<std::string, double> read_adapter_output(
    const std::filesystem::path& output_csv, std::span<const std::string> expected_ids);

std::unordered_map<std::string, double> external_adapter_predict(
    const std::filesystem::path& adapter, const std::filesystem::path& model_dir,
    const std::filesystem::path& inputs_tsv, const std::filesystem::path& output_csv);

/// Writes `inputs` to a TSV under `work_dir`, runs the adapter and returns
/// scores in input order.
std::vector<double> predict_external(const std::filesystem::path& adapter,
                                     const std::filesystem::path& model_dir,
                                     std::span<const RenderedInput> inputs,
                                     const std::filesystem::path& work_dir);

}  // namespace intimacy
