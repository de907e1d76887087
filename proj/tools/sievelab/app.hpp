#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sievelab::cli {

// Parses and executes one CLI invocation (arguments without the program
// name). Structured output goes to `out` unless --out names a file;
// diagnostics and verify progress lines go to `err`. Returns the process
// exit code: 0 on success, 1 for usage errors or failed verification,
// 2 for numerical/data failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sievelab::cli
