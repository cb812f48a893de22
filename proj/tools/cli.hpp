#pragma once

#include <iosfwd>

namespace dlimit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitInput = 2;

/// Command-line front end. Subcommands: solve, perturb, reduce, pair,
/// converge, uniqueness, localize. Returns 0 on success, 1 on a numeric
/// failure and 2 on an input or usage error.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dlimit
