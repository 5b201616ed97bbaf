#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace attnalloc {

/// Exit codes: 0 success, 1 usage error, 2 data, I/O or infeasibility error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace attnalloc
