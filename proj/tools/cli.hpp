#pragma once

#include <iosfwd>

namespace starwm::cli {

/// Exit codes: 0 success, 1 data error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace starwm::cli
