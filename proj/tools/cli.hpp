#pragma once

#include <iosfwd>

namespace ptbec::cli {

/// Runs the command line. Data goes to `out` when --out is "-", messages and
/// summaries to `err`. Returns 0 on success, 1 on solver failure, 2 on
/// invalid configuration.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ptbec::cli
