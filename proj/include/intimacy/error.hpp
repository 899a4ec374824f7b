#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intimacy {

/// Machine-readable failure classes. The CLI prints the category name as the
/// first token of its error line.
enum class ErrorCategory {
  parse,
  validation,
  argument,
  protocol,
  translation_unavailable,
  rendering,
  divergence,
  storage,
  adapter_contract,
  routing,
  coverage,
  io,
};

std::string_view to_string(ErrorCategory category) noexcept;

/// Every library failure is an Error. `subjects` carries the offending
/// identifiers (record ids, language codes, row numbers) when there are any.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message,
        std::vector<std::string> subjects = {});

  ErrorCategory category() const noexcept { return category_; }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }

 private:
  ErrorCategory category_;
  std::vector<std::string> subjects_;
};

// Joins up to `limit` items with ", ", appending a count of the rest.
std::string join_limited(const std::vector<std::string>& items, std::size_t limit = 10);

}  // namespace intimacy
