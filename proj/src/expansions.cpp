#include "mnsurv/expansions.hpp"

#include "mnsurv/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mnsurv {
namespace {

constexpr Count kExactFactorialLimit = 20;

void require_gaussian(const SurvivalInstance& instance) {
  if (!instance.gaussianEligible()) {
    throw InapplicableRoute("Gaussian representation requires J_i >= 1 for every cell");
  }
}

void require_positive_n(const SurvivalInstance& instance) {
  if (instance.bigN() < 1) {
    throw InapplicableRoute("N = n - d must be at least 1");
  }
}

Eigen::VectorXd shares_of(const SurvivalInstance& instance) {
  const auto& J = instance.shiftedGaps();
  Eigen::VectorXd w(J.size());
  const double N = static_cast<double>(instance.bigN());
  for (std::size_t i = 0; i < J.size(); ++i) {
    w[static_cast<Eigen::Index>(i)] = static_cast<double>(J[i]) / N;
  }
  return w;
}

// Full d+1 coordinates of s, strictly positive.
Eigen::VectorXd interior_point(const ProbabilityWeights& weights,
                               const Eigen::Ref<const Eigen::VectorXd>& s) {
  const int d = weights.dim();
  Eigen::VectorXd full;
  if (s.size() == d) {
    full = complete_simplex_point(s);
  } else if (s.size() == d + 1) {
    full = s;
  } else {
    throw ValidationError("dimension mismatch");
  }
  for (Eigen::Index i = 0; i < full.size(); ++i) {
    if (!(full[i] > 0.0)) {
      throw std::domain_error("point is not strictly inside the simplex (coordinate " +
                              std::to_string(i + 1) + ")");
    }
  }
  return full;
}

double gamma_star_impl(const ProbabilityWeights& weights, const Eigen::VectorXd& shares,
                       const Eigen::VectorXd& epsTilde,
                       const Eigen::Ref<const Eigen::VectorXd>& s) {
  const int d = weights.dim();
  if (s.size() != d) throw ValidationError("dimension mismatch");
  const Eigen::VectorXd full = interior_point(weights, s);
  double entropy = 0.0;
  for (int i = 0; i <= d; ++i) {
    if (shares[i] != 0.0) entropy += shares[i] * std::log(full[i] / weights.cell(i));
  }
  const Eigen::VectorXd diff = s - weights.p();
  return entropy -
         (bilinear_form(weights, epsTilde.head(d), diff) - 0.5 * quad_form(weights, diff));
}

}  // namespace

double log_factorial(Count m) {
  if (m < 0) throw ValidationError("factorial of a negative integer");
  if (m <= kExactFactorialLimit) {
    // 20! < 2^62 and its odd part fits in 53 bits, so the double is exact.
    std::uint64_t f = 1;
    for (Count i = 2; i <= m; ++i) f *= static_cast<std::uint64_t>(i);
    return std::log(static_cast<double>(f));
  }
  return std::lgamma(static_cast<double>(m) + 1.0);
}

double stirling_lambda(Count m) {
  if (m < 1) throw ValidationError("Stirling error is defined for m >= 1");
  const double x = static_cast<double>(m);
  if (m <= kExactFactorialLimit) {
    return log_factorial(m) - 0.5 * std::log(2.0 * std::numbers::pi * x) - x * std::log(x) + x;
  }
  // B_{2k} / (2k (2k-1) m^{2k-1}), k = 1..6. The first omitted term is below
  // 1e-18 at m = 21.
  static constexpr std::array<double, 6> kCoefficients = {
      1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0};
  const double inv2 = 1.0 / (x * x);
  double sum = 0.0;
  for (auto it = kCoefficients.rbegin(); it != kCoefficients.rend(); ++it) {
    sum = sum * inv2 + *it;
  }
  return sum / x;
}

double capital_lambda(const SurvivalInstance& instance) {
  require_gaussian(instance);
  double value = stirling_lambda(instance.bigN());
  for (Count J : instance.shiftedGaps()) value -= stirling_lambda(J);
  return value;
}

double gamma_tilde_at(const ProbabilityWeights& weights,
                      const Eigen::Ref<const Eigen::VectorXd>& epsTilde) {
  const int d = weights.dim();
  if (epsTilde.size() != d + 1) throw ValidationError("epsTilde needs d+1 entries");
  double entropy = 0.0;
  for (int i = 0; i <= d; ++i) {
    const double pi = weights.cell(i);
    const double e = epsTilde[i] / pi;
    if (!(1.0 + e > 0.0)) throw std::domain_error("1 + eps_i must be positive");
    entropy += pi * (1.0 + e) * std::log1p(e);
  }
  return entropy - 0.5 * quad_form(weights, epsTilde.head(d));
}

double gamma_tilde_series_at(const ProbabilityWeights& weights,
                             const Eigen::Ref<const Eigen::VectorXd>& epsTilde) {
  const int d = weights.dim();
  if (epsTilde.size() != d + 1) throw ValidationError("epsTilde needs d+1 entries");
  // The sums run over the d free cells; the implicit cell enters through
  // S = sum_i epsTilde_i = -epsTilde_{d+1}.
  double cubic = 0.0;
  double quartic = 0.0;
  double S = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = epsTilde[i];
    const double p = weights.p()[i];
    cubic += e * e * e / (p * p);
    quartic += e * e * e * e / (p * p * p);
    S += e;
  }
  const double q = weights.last();
  cubic -= S * S * S / (q * q);
  quartic += S * S * S * S / (q * q * q);
  return -cubic / 6.0 + quartic / 12.0;
}

double gamma_tilde(const SurvivalInstance& instance) {
  require_gaussian(instance);
  return gamma_tilde_at(instance.weights(), instance.epsTilde());
}

double gamma_tilde_series(const SurvivalInstance& instance) {
  require_gaussian(instance);
  return gamma_tilde_series_at(instance.weights(), instance.epsTilde());
}

double quadratic_cancellation_residual(const SurvivalInstance& instance) {
  require_positive_n(instance);
  const auto& w = instance.weights();
  const int d = w.dim();
  const auto e = instance.epsTilde().head(d);
  double doubleSum = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      doubleSum += e[i] * e[j] * ((i == j ? 1.0 / w.p()[i] : 0.0) + 1.0 / w.last());
    }
  }
  return 0.5 * doubleSum - 0.5 * quad_form(w, e);
}

double delta_n(const SurvivalInstance& instance) {
  require_gaussian(instance);
  const int d = instance.dim();
  const double N = static_cast<double>(instance.bigN());
  // ln{(N+d)!/(N! N^d)} = sum_{i<=d} ln(1 + i/N)
  double ratio = 0.0;
  for (int i = 1; i <= d; ++i) ratio += std::log1p(i / N);
  double halfLog = 0.0;
  for (int i = 0; i <= d; ++i) halfLog += std::log1p(instance.eps()[i]);
  return ratio + capital_lambda(instance) - 0.5 * halfLog - N * gamma_tilde(instance);
}

double gamma_star(const SurvivalInstance& instance, const Eigen::Ref<const Eigen::VectorXd>& s) {
  require_positive_n(instance);
  return gamma_star_impl(instance.weights(), shares_of(instance), instance.epsTilde(), s);
}

double entropy_lhs(const SurvivalInstance& instance, const Eigen::Ref<const Eigen::VectorXd>& s) {
  require_positive_n(instance);
  const auto& w = instance.weights();
  if (s.size() != w.dim()) throw ValidationError("dimension mismatch");
  const Eigen::VectorXd full = interior_point(w, s);
  const Eigen::VectorXd shares = shares_of(instance);
  double value = 0.0;
  for (int i = 0; i <= w.dim(); ++i) {
    if (shares[i] != 0.0) value += shares[i] * std::log(full[i] / w.cell(i));
  }
  return value;
}

double h_value(const SurvivalInstance& instance, const Eigen::Ref<const Eigen::VectorXd>& s) {
  require_positive_n(instance);
  const Eigen::VectorXd full = interior_point(instance.weights(), s);
  const Eigen::VectorXd shares = shares_of(instance);
  double value = 0.0;
  for (Eigen::Index i = 0; i < full.size(); ++i) {
    if (shares[i] != 0.0) value += shares[i] * std::log(full[i]);
  }
  return value;
}

Eigen::VectorXd h_grad(const SurvivalInstance& instance,
                       const Eigen::Ref<const Eigen::VectorXd>& s) {
  require_positive_n(instance);
  const int d = instance.dim();
  const Eigen::VectorXd full = interior_point(instance.weights(), s);
  const Eigen::VectorXd shares = shares_of(instance);
  const double lastTerm = shares[d] / full[d];
  Eigen::VectorXd grad(d);
  for (int i = 0; i < d; ++i) grad[i] = shares[i] / full[i] - lastTerm;
  return grad;
}

Eigen::MatrixXd h_hessian(const SurvivalInstance& instance,
                          const Eigen::Ref<const Eigen::VectorXd>& s) {
  require_positive_n(instance);
  const int d = instance.dim();
  const Eigen::VectorXd full = interior_point(instance.weights(), s);
  const Eigen::VectorXd shares = shares_of(instance);
  Eigen::MatrixXd hess =
      Eigen::MatrixXd::Constant(d, d, -shares[d] / (full[d] * full[d]));
  for (int i = 0; i < d; ++i) hess(i, i) -= shares[i] / (full[i] * full[i]);
  return hess;
}

DirichletIntegrand::DirichletIntegrand(const SurvivalInstance& instance)
    : instance_(instance) {
  if (!instance.dirichletEligible()) {
    throw InapplicableRoute("Dirichlet representation requires every gap j_i >= 1");
  }
  logPrefactor_ = log_factorial(instance.n());
  for (Count J : instance.shiftedGaps()) logPrefactor_ -= log_factorial(J);
}

double DirichletIntegrand::operator()(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  const int d = instance_.dim();
  if (s.size() != d) throw ValidationError("dimension mismatch");
  const auto& J = instance_.shiftedGaps();
  double value = logPrefactor_;
  double last = 1.0;
  for (int i = 0; i <= d; ++i) {
    const double si = i < d ? s[i] : last;
    if (i < d) last -= s[i];
    if (si < 0.0) throw std::domain_error("point lies outside the simplex");
    if (J[i] == 0) continue;
    if (si == 0.0) return -std::numeric_limits<double>::infinity();
    value += static_cast<double>(J[i]) * std::log(si);
  }
  return value;
}

double log_dirichlet_integrand(const SurvivalInstance& instance,
                               const Eigen::Ref<const Eigen::VectorXd>& s) {
  return DirichletIntegrand(instance)(s);
}

ExpansionContext::ExpansionContext(const SurvivalInstance& instance)
    : instance_(instance), cov_(instance.weights()) {
  require_gaussian(instance_);
  shares_ = shares_of(instance_);
  lambdaN_ = stirling_lambda(instance_.bigN());
  const auto& J = instance_.shiftedGaps();
  lambdaJ_.resize(static_cast<Eigen::Index>(J.size()));
  capitalLambda_ = lambdaN_;
  for (std::size_t i = 0; i < J.size(); ++i) {
    lambdaJ_[static_cast<Eigen::Index>(i)] = stirling_lambda(J[i]);
    capitalLambda_ -= lambdaJ_[static_cast<Eigen::Index>(i)];
  }
  gammaTilde_ = gamma_tilde(instance_);
  deltaN_ = delta_n(instance_);
}

double ExpansionContext::gammaStar(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  return gamma_star_impl(instance_.weights(), shares_, instance_.epsTilde(), s);
}

double ExpansionContext::logGaussianIntegrand(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  const auto& w = instance_.weights();
  const int d = w.dim();
  const double N = static_cast<double>(instance_.bigN());
  const Eigen::VectorXd arg =
      std::sqrt(N) * (w.p() - s + instance_.epsTilde().head(d));
  return deltaN_ + N * gammaStar(s) + 0.5 * d * std::log(N) + cov_.logDensity(arg);
}

double log_gaussian_integrand(const SurvivalInstance& instance,
                              const Eigen::Ref<const Eigen::VectorXd>& s) {
  return ExpansionContext(instance).logGaussianIntegrand(s);
}

}  // namespace mnsurv
