#include "intimacy/hashing.hpp"

namespace intimacy {

namespace {

std::size_t sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

}  // namespace

std::vector<std::string_view> utf8_code_points(std::string_view text) {
  std::vector<std::string_view> points;
  points.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = sequence_length(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    points.push_back(text.substr(i, len));
    i += len;
  }
  return points;
}

}  // namespace intimacy
