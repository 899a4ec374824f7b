#include "intimacy/error.hpp"

namespace intimacy {

std::string_view to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::argument: return "argument";
    case ErrorCategory::protocol: return "protocol";
    case ErrorCategory::translation_unavailable: return "translation-unavailable";
    case ErrorCategory::rendering: return "rendering";
    case ErrorCategory::divergence: return "divergence";
    case ErrorCategory::storage: return "storage";
    case ErrorCategory::adapter_contract: return "adapter-contract";
    case ErrorCategory::routing: return "routing";
    case ErrorCategory::coverage: return "coverage";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCategory category, const std::string& message,
             std::vector<std::string> subjects)
    : std::runtime_error(message), category_(category), subjects_(std::move(subjects)) {}

std::string join_limited(const std::vector<std::string>& items, std::size_t limit) {
  std::string out;
  const std::size_t shown = std::min(items.size(), limit);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  if (items.size() > shown) {
    out += " (+" + std::to_string(items.size() - shown) + " more)";
  }
  return out;
}

}  // namespace intimacy
