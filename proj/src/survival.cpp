#include "mnsurv/survival.hpp"

#include "mnsurv/errors.hpp"
#include "mnsurv/expansions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mnsurv {
namespace {

// Neumaier's variant of compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

class LatticeWalk {
 public:
  explicit LatticeWalk(const SurvivalInstance& instance)
      : n_(instance.n()), d_(instance.dim()), kappa_(instance.thresholds().kappa()) {
    logFactorial_.resize(static_cast<std::size_t>(n_) + 1);
    for (Count m = 0; m <= n_; ++m) logFactorial_[static_cast<std::size_t>(m)] = log_factorial(m);
    logP_.resize(d_);
    for (int i = 0; i < d_; ++i) logP_[i] = std::log(instance.weights().p()[i]);
    logLast_ = std::log(instance.weights().last());
  }

  double run() {
    visit(0, 0, logFactorial_[static_cast<std::size_t>(n_)]);
    return sum_.value();
  }

 private:
  // partial holds ln n! - sum_{m<i} (ln x_m! - x_m ln p_m).
  void visit(int i, Count used, double partial) {
    if (i == d_) {
      const Count rest = n_ - used;
      sum_.add(std::exp(partial - logFactorial_[static_cast<std::size_t>(rest)] +
                        static_cast<double>(rest) * logLast_));
      return;
    }
    const Count low = std::max<Count>(0, kappa_[i] - used);
    for (Count x = low; x <= n_ - used; ++x) {
      visit(i + 1, used + x,
            partial - logFactorial_[static_cast<std::size_t>(x)] +
                static_cast<double>(x) * logP_[i]);
    }
  }

  Count n_;
  int d_;
  const std::vector<Count>& kappa_;
  std::vector<double> logFactorial_;
  std::vector<double> logP_;
  double logLast_;
  CompensatedSum sum_;
};

std::string gaussian_inapplicability(const SurvivalInstance& instance) {
  for (Count J : instance.shiftedGaps()) {
    if (J == 0) return "J_i = 0";
  }
  return "J_i < 0 (zero threshold not reduced)";
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

double lattice_size(Count n, int d) {
  // C(n + d, d) as a running product
  double size = 1.0;
  for (int i = 1; i <= d; ++i) {
    size *= static_cast<double>(n + i) / static_cast<double>(i);
  }
  return size;
}

double survival_exact(const SurvivalInstance& instance) {
  if (instance.impossible()) return 0.0;
  if (instance.thresholds().total() == 0) return 1.0;
  if (lattice_size(instance.n(), instance.dim()) > kMaxLatticePoints) {
    throw CostGuardError("enumeration would visit more than 1e7 lattice points");
  }
  return LatticeWalk(instance).run();
}

double survival_dirichlet(const SurvivalInstance& instance, const QuadratureSpec& spec) {
  if (instance.impossible()) return 0.0;
  if (instance.hasZeroThreshold()) {
    throw ValidationError("Dirichlet route needs reduced thresholds (k_i >= 1)");
  }
  const DirichletIntegrand integrand(instance);
  return integrate_region(
             instance.weights(), [&](const Eigen::VectorXd& s) { return integrand(s); }, spec)
      .value;
}

double survival_gaussian(const SurvivalInstance& instance, const QuadratureSpec& spec) {
  if (instance.impossible()) return 0.0;
  if (!instance.gaussianEligible()) throw InapplicableRoute(gaussian_inapplicability(instance));
  const ExpansionContext context(instance);
  return integrate_region(
             instance.weights(),
             [&](const Eigen::VectorXd& s) { return context.logGaussianIntegrand(s); }, spec)
      .value;
}

MonteCarloEstimate survival_mc(const SurvivalInstance& instance, Count replications,
                               std::uint64_t seed) {
  QuadratureSpec::monte_carlo(replications, seed).validate();
  const int d = instance.dim();
  const auto& prefix = instance.weights().prefix();
  const auto& kappa = instance.thresholds().kappa();
  UniformStream uniforms(seed);
  std::vector<Count> cell(d + 1);
  Count hits = 0;
  for (Count r = 0; r < replications; ++r) {
    std::fill(cell.begin(), cell.end(), 0);
    for (Count u = 0; u < instance.n(); ++u) {
      const double value = uniforms.next();
      const auto it = std::lower_bound(prefix.begin(), prefix.end(), value);
      ++cell[static_cast<std::size_t>(it - prefix.begin())];
    }
    bool holds = true;
    Count cumulative = 0;
    for (int i = 0; i < d && holds; ++i) {
      cumulative += cell[i];
      holds = cumulative >= kappa[i];
    }
    if (holds) ++hits;
  }
  const double R = static_cast<double>(replications);
  const double estimate = static_cast<double>(hits) / R;
  return {estimate, std::sqrt(estimate * (1.0 - estimate) / R), replications, seed};
}

RouteReport compare_routes(const SurvivalInstance& instance, const QuadratureSpec& spec,
                           const std::optional<QuadratureSpec>& mcSpec, RouteSelection routes,
                           double tolerance) {
  spec.validate();
  if (routes.mc && !mcSpec) throw ValidationError("Monte Carlo route needs a seed");

  RouteReport report;
  report.n = instance.n();
  report.p = instance.weights().p();
  report.k = instance.thresholds().k();
  report.nodes = spec.nodesPerAxis;
  report.tolerance = tolerance;

  const auto reduced = reduce(instance);
  auto fill = [&](double value) {
    if (routes.exact) report.exact = value;
    if (routes.dirichlet) report.dirichlet = value;
    if (routes.gaussian) report.gaussian = value;
  };
  auto attempt = [&](RouteValue& slot, auto&& route) {
    try {
      slot = route();
    } catch (const InapplicableRoute& e) {
      slot = Inapplicable{e.what()};
    }
  };

  if (!reduced) {
    fill(1.0);
  } else if (reduced->impossible()) {
    fill(0.0);
  } else {
    if (routes.exact) report.exact = survival_exact(*reduced);
    if (routes.dirichlet) {
      attempt(report.dirichlet, [&] { return survival_dirichlet(*reduced, spec); });
    }
    if (routes.gaussian) {
      attempt(report.gaussian, [&] { return survival_gaussian(*reduced, spec); });
    }
    if (reduced->gaussianEligible()) {
      const ExpansionContext context(*reduced);
      report.deltaN = context.deltaN();
      report.gammaTilde = context.gammaTilde();
    }
  }

  if (routes.mc) {
    const auto& mc = *mcSpec;
    report.mc = survival_mc(instance, mc.replications, mc.seed);
  }

  std::vector<double> values;
  for (const RouteValue* slot : {&report.exact, &report.dirichlet, &report.gaussian}) {
    if (const double* v = std::get_if<double>(slot)) values.push_back(*v);
  }
  for (std::size_t a = 0; a < values.size(); ++a) {
    for (std::size_t b = a + 1; b < values.size(); ++b) {
      report.maxRelDiff = std::max(report.maxRelDiff, relative_gap(values[a], values[b]));
    }
  }
  return report;
}

}  // namespace mnsurv
