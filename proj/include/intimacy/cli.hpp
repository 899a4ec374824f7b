#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace intimacy {

/// `args` excludes the program name.
/// Exit codes: 0 success, 1 runtime failure (one line `error[<category>] <detail>`
/// on `err`), 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace intimacy
