#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace intimacy {

inline constexpr std::string_view kFeatureHashAlgorithm = "fnv1a-64";
inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// 64-bit FNV-1a. The seed is XOR-ed into the offset basis, so seed 0 gives
/// the standard FNV-1a value.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0) noexcept {
  std::uint64_t hash = kFnvOffsetBasis ^ seed;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= kFnvPrime;
  }
  return hash;
}

/// Splits UTF-8 text into code-point byte ranges. Malformed sequences are
/// passed through one byte at a time.
std::vector<std::string_view> utf8_code_points(std::string_view text);

}  // namespace intimacy
