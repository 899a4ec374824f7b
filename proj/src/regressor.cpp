#include "intimacy/regressor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "intimacy/csv.hpp"
#include "intimacy/error.hpp"
#include "intimacy/hashing.hpp"
#include "intimacy/random.hpp"

namespace intimacy {

static_assert(std::endian::native == std::endian::little,
              "model blobs are written in host byte order, assumed little-endian");

namespace {

constexpr std::string_view kModelMagic = "intimacy-model v1";

constexpr std::uint64_t fnv_append(std::uint64_t hash, std::string_view bytes) noexcept {
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= kFnvPrime;
  }
  return hash;
}

nlohmann::json config_to_json(const TrainingConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"max_sequence_length", c.max_sequence_length},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed}};
}

TrainingConfig config_from_json(const nlohmann::json& j) {
  TrainingConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.max_sequence_length = j.at("max_sequence_length").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

template <typename T>
void write_raw(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
bool read_raw(std::istream& in, T& value) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) return false;
  std::memcpy(&value, bytes, sizeof(T));
  return true;
}

}  // namespace

TrainingConfig TrainingConfig::for_reference_backbone() {
  TrainingConfig config;
  config.learning_rate = kReferenceLearningRate;
  return config;
}

void TrainingConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCategory::argument, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCategory::argument, "batch size must be >= 1");
  if (max_sequence_length < 8) {
    throw Error(ErrorCategory::argument, "max sequence length must be >= 8");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCategory::argument, "learning rate must be a positive finite number");
  }
}

HashGramModel::HashGramModel(HashGramOptions options)
    : options_(options), weights_(Eigen::VectorXd::Zero(options.feature_dim)) {
  if (options_.feature_dim < 1 || options_.min_n < 1 || options_.max_n < options_.min_n) {
    throw Error(ErrorCategory::argument, "invalid hashed n-gram options");
  }
}

SparseFeatures HashGramModel::featurize(std::string_view text) const {
  const auto points = utf8_code_points(text);
  std::vector<Eigen::Index> buckets;
  buckets.reserve(points.size() * static_cast<std::size_t>(options_.max_n - options_.min_n + 1));
  const auto dim = static_cast<std::uint64_t>(options_.feature_dim);
  for (int n = options_.min_n; n <= options_.max_n; ++n) {
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + un <= points.size(); ++i) {
      const char* begin = points[i].data();
      const char* end = points[i + un - 1].data() + points[i + un - 1].size();
      std::uint64_t h = kFnvOffsetBasis ^ options_.hash_seed;
      const char length_byte = static_cast<char>(n);
      h = fnv_append(h, std::string_view(&length_byte, 1));
      h = fnv_append(h, std::string_view(begin, static_cast<std::size_t>(end - begin)));
      buckets.push_back(static_cast<Eigen::Index>(h % dim));
    }
  }
  std::sort(buckets.begin(), buckets.end());

  SparseFeatures x(options_.feature_dim);
  x.reserve(static_cast<Eigen::Index>(buckets.size()));
  double norm2 = 0.0;
  for (std::size_t i = 0; i < buckets.size();) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    const auto count = static_cast<double>(j - i);
    x.insertBack(buckets[i]) = count;
    norm2 += count * count;
    i = j;
  }
  if (norm2 > 0.0) x /= std::sqrt(norm2);
  return x;
}

double HashGramModel::predict(const SparseFeatures& x) const {
  double sum = bias_;
  for (SparseFeatures::InnerIterator it(x); it; ++it) sum += weights_[it.index()] * it.value();
  return sum;
}

double HashGramModel::loss(std::span<const SparseFeatures> features,
                           std::span<const double> labels,
                           std::span<const std::size_t> rows) const {
  double total = 0.0;
  for (const auto row : rows) {
    const double r = predict(features[row]) - labels[row];
    total += r * r;
  }
  return total / static_cast<double>(rows.size());
}

HashGramModel::Gradient HashGramModel::gradient(std::span<const SparseFeatures> features,
                                                std::span<const double> labels,
                                                std::span<const std::size_t> rows) const {
  Gradient g{Eigen::VectorXd::Zero(options_.feature_dim), 0.0};
  const double scale = 2.0 / static_cast<double>(rows.size());
  for (const auto row : rows) {
    const double r = predict(features[row]) - labels[row];
    for (SparseFeatures::InnerIterator it(features[row]); it; ++it) {
      g.weights[it.index()] += scale * r * it.value();
    }
    g.bias += scale * r;
  }
  return g;
}

void HashGramModel::step(std::span<const SparseFeatures> features,
                         std::span<const double> labels, std::span<const std::size_t> rows,
                         double learning_rate) {
  // Residuals are taken at the pre-step parameters so the update equals
  // -learning_rate * gradient().
  std::vector<double> residuals(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    residuals[k] = predict(features[rows[k]]) - labels[rows[k]];
  }
  const double scale = learning_rate * 2.0 / static_cast<double>(rows.size());
  double bias_step = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (SparseFeatures::InnerIterator it(features[rows[k]]); it; ++it) {
      weights_[it.index()] -= scale * residuals[k] * it.value();
    }
    bias_step += residuals[k];
  }
  bias_ -= scale * bias_step;
}

namespace {

std::vector<SparseFeatures> featurize_all(const HashGramModel& model,
                                          std::span<const RenderedInput> inputs,
                                          int max_sequence_length) {
  std::vector<SparseFeatures> features;
  features.reserve(inputs.size());
  for (const auto& in : inputs) {
    features.push_back(
        model.featurize(truncate(in, static_cast<std::size_t>(max_sequence_length)).text));
  }
  return features;
}

}  // namespace

ModelHandle train(std::span<const RenderedInput> inputs, std::span<const double> labels,
                  const TrainingConfig& config, const TrainOptions& options) {
  config.validate();
  if (options.backbone_id != kHashGramBackboneId) {
    throw Error(ErrorCategory::argument,
                "backbone '" + options.backbone_id + "' cannot be trained here; only " +
                    std::string(kHashGramBackboneId) + " is built in");
  }
  if (inputs.empty()) throw Error(ErrorCategory::argument, "no training inputs");
  if (inputs.size() != labels.size()) {
    throw Error(ErrorCategory::argument, "inputs and labels differ in length");
  }
  if (inputs.size() < static_cast<std::size_t>(config.batch_size)) {
    throw Error(ErrorCategory::argument, "fewer training inputs (" +
                                             std::to_string(inputs.size()) +
                                             ") than one batch (" +
                                             std::to_string(config.batch_size) + ")");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!(labels[i] >= kMinScore && labels[i] <= kMaxScore)) {
      throw Error(ErrorCategory::argument,
                  "label of " + inputs[i].record_id + " outside [1, 5]", {inputs[i].record_id});
    }
  }
  const Strategy strategy = inputs.front().strategy;
  for (const auto& in : inputs) {
    if (in.strategy != strategy) {
      throw Error(ErrorCategory::argument, "training inputs mix rendering strategies");
    }
  }

  ModelHandle handle{std::string(kHashGramBackboneId), strategy, config,
                     HashGramModel(options.features)};
  HashGramModel& model = handle.model;
  const auto features = featurize_all(model, inputs, config.max_sequence_length);

  model.set_bias(std::accumulate(labels.begin(), labels.end(), 0.0) /
                 static_cast<double>(labels.size()));

  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng rng(config.seed);
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch, ++batches) {
      const std::span<const std::size_t> rows(order.data() + start,
                                              std::min(batch, order.size() - start));
      if (options.observer) options.observer(epoch, batches, rows);
      const double loss = model.loss(features, labels, rows);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCategory::divergence,
                    "non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                        std::to_string(batches + 1),
                    {std::to_string(epoch + 1), std::to_string(batches + 1)});
      }
      if (options.trace) options.trace->batch_losses.push_back(loss);
      epoch_loss += loss;
      model.step(features, labels, rows, config.learning_rate);
    }
    if (!std::isfinite(model.bias()) || !model.weights().allFinite()) {
      throw Error(ErrorCategory::divergence,
                  "parameters became non-finite during epoch " + std::to_string(epoch + 1),
                  {std::to_string(epoch + 1)});
    }
    if (options.trace) {
      options.trace->epoch_mean_losses.push_back(epoch_loss / static_cast<double>(batches));
    }
  }
  return handle;
}

std::vector<double> predict(const ModelHandle& handle, std::span<const RenderedInput> inputs,
                            const PredictOptions& options) {
  std::vector<double> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) {
    const auto truncated =
        truncate(in, static_cast<std::size_t>(handle.config.max_sequence_length));
    double y = handle.model.predict(handle.model.featurize(truncated.text));
    if (options.clamp) y = std::clamp(y, kMinScore, kMaxScore);
    out.push_back(y);
  }
  return out;
}

void save_model(const ModelHandle& handle, const std::filesystem::path& path) {
  const auto& opts = handle.model.options();
  const auto& w = handle.model.weights();
  std::uint64_t nnz = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) nnz += w[i] != 0.0;

  nlohmann::json header{
      {"backbone_id", handle.backbone_id},
      {"strategy", to_string(handle.strategy)},
      {"config", config_to_json(handle.config)},
      {"features",
       {{"kind", "char-ngram"},
        {"feature_dim", opts.feature_dim},
        {"min_n", opts.min_n},
        {"max_n", opts.max_n},
        {"hash", kFeatureHashAlgorithm},
        {"hash_seed", opts.hash_seed},
        {"normalization", "l2"}}},
      {"nonzero_weights", nnz},
      {"payload", "f64 bias, then nonzero_weights x (u64 index, f64 value), little-endian"}};

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::storage, "cannot write model " + path.string(), {path.string()});
  out << kModelMagic << '\n' << header.dump() << '\n';
  write_raw(out, handle.model.bias());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    write_raw(out, static_cast<std::uint64_t>(i));
    write_raw(out, w[i]);
  }
  if (!out) throw Error(ErrorCategory::storage, "write failed for " + path.string(), {path.string()});
}

ModelHandle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  auto fail = [&](const std::string& why) {
    return Error(ErrorCategory::storage, "cannot load model " + path.string() + ": " + why,
                 {path.string()});
  };
  if (!in) throw fail("unreadable");
  std::string magic;
  std::string header_line;
  if (!std::getline(in, magic) || magic != kModelMagic) throw fail("bad magic line");
  if (!std::getline(in, header_line)) throw fail("missing header");

  try {
    const auto header = nlohmann::json::parse(header_line);
    const auto& f = header.at("features");
    if (f.at("hash").get<std::string>() != kFeatureHashAlgorithm) throw fail("unknown hash");
    HashGramOptions opts;
    opts.feature_dim = f.at("feature_dim").get<Eigen::Index>();
    opts.min_n = f.at("min_n").get<int>();
    opts.max_n = f.at("max_n").get<int>();
    opts.hash_seed = f.at("hash_seed").get<std::uint64_t>();

    ModelHandle handle{header.at("backbone_id").get<std::string>(),
                       parse_strategy(header.at("strategy").get<std::string>()),
                       config_from_json(header.at("config")), HashGramModel(opts)};
    double bias = 0.0;
    if (!read_raw(in, bias)) throw fail("truncated payload");
    handle.model.set_bias(bias);
    const auto nnz = header.at("nonzero_weights").get<std::uint64_t>();
    for (std::uint64_t k = 0; k < nnz; ++k) {
      std::uint64_t index = 0;
      double value = 0.0;
      if (!read_raw(in, index) || !read_raw(in, value)) throw fail("truncated payload");
      if (index >= static_cast<std::uint64_t>(opts.feature_dim)) throw fail("weight index out of range");
      handle.model.weights()[static_cast<Eigen::Index>(index)] = value;
    }
    if (in.peek() != std::char_traits<char>::eof()) throw fail("trailing bytes");
    return handle;
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::storage) throw;
    throw fail(e.what());
  }
}

}  // namespace intimacy
