#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace intimacy {

/// Identifier persisted in run metadata. Changing the permutation procedure
/// below requires a new identifier.
inline constexpr std::string_view kShuffleAlgorithm = "fisher-yates/mt19937_64/rejection-v1";

/// Seeded generator whose output sequence is fixed by the C++ standard
/// (mt19937_64), with portable bounded draws. std::uniform_int_distribution
/// is implementation-defined, so it is not used anywhere partitions or
/// training order must be reproducible.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// In-place Fisher–Yates shuffle, iterating from the back.
template <typename T>
void shuffle(std::vector<T>& items, SeededRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace intimacy
