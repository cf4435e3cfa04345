#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mfbog/config.h"

namespace mfbog {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitAssertion = 4,
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  // measured quantity
  double bound = 0.0;  // threshold it was compared with
};

/// CCR, excitation-map identities, (anti-)hermiticity, the cubic generator
/// relation, unitarity of U_B and the Onsager sweep on the given config.
std::vector<CheckResult> run_selftest(const RunConfig& config);

/// Entry point: predict | exact | scan | fit | compare | selftest.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfbog
