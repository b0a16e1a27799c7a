#pragma once

#include <iosfwd>

namespace advreg::cli {

/// Parses argv and dispatches to the matching cmd_*; returns the exit code.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace advreg::cli
