#pragma once

#include <iosfwd>

namespace qfrac {

/// Runs the qfrac command line. Returns the process exit code:
/// 0 all checks hold, 1 at least one violation, 2 usage or config error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qfrac
