#pragma once

#include <ostream>

namespace parafrac::cli {

/// Full command-line front end. Returns the process exit code:
/// 0 success, 1 check/tolerance failure, 2 usage/config errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace parafrac::cli
