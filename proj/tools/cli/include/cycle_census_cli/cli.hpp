#pragma once

#include <ostream>

namespace cycle_census::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitExperimentFailure = 2;
inline constexpr int kExitVerifyFailure = 3;

// Entry point of the cycle-census executable. Subcommands: sample-fields,
// count-cycles, theorem-a, tail, slln, clt, kac, verify.
int parse_and_dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cycle_census::cli
