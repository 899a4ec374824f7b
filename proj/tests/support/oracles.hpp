#pragma once

// Brute-force reference computations, written without Eigen and without any
// library code so they stay independent of the paths they check.

#include <cmath>
#include <optional>
#include <vector>

namespace intimacy::testing {

/// Textbook single-pass form n·Σxy − Σx·Σy over √((n·Σx² − (Σx)²)(n·Σy² − (Σy)²)),
/// accumulated in long double.
inline std::optional<double> brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nullopt;
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double a = x[i];
    const long double b = y[i];
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  const long double N = static_cast<long double>(n);
  const long double vx = N * sxx - sx * sx;
  const long double vy = N * syy - sy * sy;
  if (vx <= 0 || vy <= 0) return std::nullopt;
  return static_cast<double>((N * sxy - sx * sy) / std::sqrt(vx * vy));
}

inline double brute_mse(const std::vector<double>& pred, const std::vector<double>& gold) {
  long double total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const long double d = static_cast<long double>(pred[i]) - gold[i];
    total += d * d;
  }
  return static_cast<double>(total / static_cast<long double>(pred.size()));
}

inline double brute_mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

}  // namespace intimacy::testing
