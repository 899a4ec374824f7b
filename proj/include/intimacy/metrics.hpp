#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intimacy/error.hpp"

namespace intimacy {

/// Pearson's r (nullopt when undefined) alongside mean squared error.
struct MetricPair {
  std::optional<double> pearson_r;
  double mse = 0.0;

  bool operator==(const MetricPair&) const = default;
};

namespace detail {

template <typename DerivedX, typename DerivedY>
void require_same_length(const Eigen::MatrixBase<DerivedX>& x,
                         const Eigen::MatrixBase<DerivedY>& y, const char* what) {
  if (x.size() != y.size()) {
    throw Error(ErrorCategory::argument, std::string(what) + ": length mismatch (" +
                                             std::to_string(x.size()) + " vs " +
                                             std::to_string(y.size()) + ")");
  }
}

inline Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> values) {
  return {values.data(), static_cast<Eigen::Index>(values.size())};
}

}  // namespace detail

/// Sample correlation Σ(x−x̄)(y−ȳ) / √(Σ(x−x̄)² Σ(y−ȳ)²). Undefined (nullopt)
/// for fewer than two points or when either input is constant.
template <typename DerivedX, typename DerivedY>
std::optional<typename DerivedX::Scalar> pearson_r(const Eigen::MatrixBase<DerivedX>& x,
                                                   const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  detail::require_same_length(x, y, "pearson_r");
  if (x.size() < 2) return std::nullopt;
  if (x.minCoeff() == x.maxCoeff() || y.minCoeff() == y.maxCoeff()) return std::nullopt;

  const auto xc = (x.array() - x.mean()).eval();
  const auto yc = (y.array().template cast<Scalar>() - Scalar(y.mean())).eval();
  const Scalar sxx = xc.square().sum();
  const Scalar syy = yc.square().sum();
  if (sxx == Scalar(0) || syy == Scalar(0)) return std::nullopt;
  const Scalar r = (xc * yc).sum() / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r, Scalar(-1), Scalar(1));
}

inline std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y) {
  return pearson_r(detail::as_vector(x), detail::as_vector(y));
}

/// Mean of squared differences; inputs must be non-empty and equally long.
template <typename DerivedP, typename DerivedG>
typename DerivedP::Scalar mse(const Eigen::MatrixBase<DerivedP>& pred,
                              const Eigen::MatrixBase<DerivedG>& gold) {
  detail::require_same_length(pred, gold, "mse");
  if (pred.size() == 0) throw Error(ErrorCategory::argument, "mse: empty input");
  return (pred - gold).squaredNorm() / static_cast<typename DerivedP::Scalar>(pred.size());
}

inline double mse(std::span<const double> pred, std::span<const double> gold) {
  return mse(detail::as_vector(pred), detail::as_vector(gold));
}

inline MetricPair score(std::span<const double> pred, std::span<const double> gold) {
  return {pearson_r(pred, gold), mse(pred, gold)};
}

/// Distribution summary with population standard deviation.
struct SummaryStats {
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
};

template <typename Derived>
SummaryStats summarize(const Eigen::MatrixBase<Derived>& values) {
  SummaryStats s;
  s.n = static_cast<std::size_t>(values.size());
  if (s.n == 0) return s;
  s.min = values.minCoeff();
  s.max = values.maxCoeff();
  s.mean = values.mean();
  s.std = std::sqrt((values.array() - s.mean).square().sum() / static_cast<double>(s.n));
  return s;
}

inline SummaryStats summarize(std::span<const double> values) {
  return summarize(detail::as_vector(values));
}

/// Fixed-width bins over [lo, hi); the top edge belongs to the last bin.
/// Values outside the range are tallied separately, never dropped silently.
struct Histogram {
  double lo = 0.5;
  double hi = 5.5;
  double width = 0.25;
  std::vector<std::size_t> counts;
  std::size_t below = 0;
  std::size_t above = 0;

  std::size_t bins() const noexcept { return counts.size(); }
  double bin_lo(std::size_t i) const noexcept { return lo + width * static_cast<double>(i); }
};

inline Histogram histogram(std::span<const double> values, double lo = 0.5, double hi = 5.5,
                           double width = 0.25) {
  Histogram h{lo, hi, width, {}, 0, 0};
  const auto bins = static_cast<std::size_t>(std::llround((hi - lo) / width));
  h.counts.assign(bins, 0);
  for (const double v : values) {
    if (v < lo) {
      ++h.below;
    } else if (v > hi) {
      ++h.above;
    } else {
      auto i = static_cast<std::size_t>(std::floor((v - lo) / width));
      h.counts[std::min(i, bins - 1)] += 1;
    }
  }
  return h;
}

}  // namespace intimacy
