#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include "grwlab/warpkit.hpp"

namespace grwlab::cli {

/// Process exit codes; a stable contract for scripts and CI.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInfeasible = 2,
  kCheckFailed = 3,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Window syntax: "(lo,hi]", "[lo,hi)", ... with explicit brackets, or a bare
/// "lo,hi" which is closed except at infinite ends and at ends that coincide
/// with an (open) boundary of `domain`. "inf"/"-inf" are accepted.
IntervalDomain parse_window(std::string_view text, const IntervalDomain& domain);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string config_hash(std::string_view text);

}  // namespace grwlab::cli
