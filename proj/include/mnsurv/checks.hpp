#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mnsurv {

struct CheckOptions {
  std::uint64_t seed = 0;
  double routeTolerance = 1e-8;
  double identityTolerance = 1e-10;
  int nodes = 48;
};

struct CheckResult {
  std::string name;
  double residual;
  double tolerance;
  bool pass;
};

/// Runs every algebraic identity and route-agreement invariant over a built-in
/// panel plus seeded random instances. Residuals are the worst case observed.
std::vector<CheckResult> run_check_suite(const CheckOptions& options);

}  // namespace mnsurv
