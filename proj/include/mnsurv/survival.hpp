#pragma once

// Four routes to P(X_1 + ... + X_i >= kappa_i for all i), X ~ Multinomial(n, p):
//   exact      lattice enumeration of the multinomial pmf
//   dirichlet  Gauss-Legendre quadrature of the Dirichlet integrand over R_d
//   gaussian   the same integral written as exp(Delta_N + N gamma*) times a
//              scaled normal density with covariance Sigma_p
//   mc         simulation through uniform order statistics

#include "mnsurv/model.hpp"
#include "mnsurv/quadrature.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mnsurv {

inline constexpr double kMaxLatticePoints = 1e7;

/// Number of lattice points C(n + d, d) the enumeration would visit.
double lattice_size(Count n, int d);

/// Sum of the multinomial pmf over the constrained lattice, log-space terms
/// with Kahan summation. Accepts any instance (zero thresholds, n < d,
/// kappa_d > n). Throws CostGuardError beyond 1e7 lattice points.
double survival_exact(const SurvivalInstance& instance);

/// Requires k_i >= 1 for all i (ValidationError otherwise); kappa_d > n gives 0.
double survival_dirichlet(const SurvivalInstance& instance, const QuadratureSpec& spec);

/// Requires J_i >= 1 for every cell (InapplicableRoute otherwise); kappa_d > n gives 0.
double survival_gaussian(const SurvivalInstance& instance, const QuadratureSpec& spec);

/// Simulates n uniforms per replication and counts those below each P_i. The
/// event holds iff every count reaches kappa_i, i.e. U_(kappa_i) <= P_i.
MonteCarloEstimate survival_mc(const SurvivalInstance& instance, Count replications,
                               std::uint64_t seed);

struct Inapplicable {
  std::string reason;
};

/// Not requested, a probability, or the reason the route does not apply.
using RouteValue = std::variant<std::monostate, double, Inapplicable>;

struct RouteSelection {
  bool exact = true;
  bool dirichlet = true;
  bool gaussian = true;
  bool mc = false;
};

struct RouteReport {
  Count n = 0;
  Eigen::VectorXd p;
  std::vector<Count> k;

  RouteValue exact;
  RouteValue dirichlet;
  RouteValue gaussian;
  std::optional<MonteCarloEstimate> mc;

  std::optional<double> deltaN;
  std::optional<double> gammaTilde;
  /// Largest |a - b| / max(|a|, |b|) over pairs of computed deterministic
  /// routes; 0 when fewer than two are available.
  double maxRelDiff = 0.0;

  int nodes = kDefaultNodes;
  double tolerance = 1e-8;
};

/// Reduces zero thresholds, runs the selected routes and records diagnostics.
/// Route inapplicability is recorded, never thrown; cost guards still throw.
/// mcSpec is required when routes.mc is set.
RouteReport compare_routes(const SurvivalInstance& instance, const QuadratureSpec& spec,
                           const std::optional<QuadratureSpec>& mcSpec,
                           RouteSelection routes = {}, double tolerance = 1e-8);

}  // namespace mnsurv
