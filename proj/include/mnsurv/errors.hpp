#pragma once

#include <stdexcept>

namespace mnsurv {

/// Bad problem input: malformed weights, thresholds or dimensions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A route's preconditions do not hold for the instance (e.g. J_i = 0 for the
/// Gaussian representation). compare_routes records the message instead of
/// propagating it.
class InapplicableRoute : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Enumeration or quadrature would exceed the configured work budget.
class CostGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mnsurv
