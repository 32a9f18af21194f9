#pragma once

#include <iosfwd>

namespace heston::cli {

/// Runs one command line. Returns 0 on success, 1 for usage and validation errors,
/// 2 for numerical failures. Results go to `out` (or --output), progress and errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heston::cli
