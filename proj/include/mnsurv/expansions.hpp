#pragma once

// Scalar kernels of the Gaussian representation of the multinomial joint
// survival function: Stirling errors, the correction terms Delta_N,
// gamma~(eps), gamma*(s), the concave log-kernel H(s), and the two pointwise
// equal log-integrands (Dirichlet and Gaussian form).
//
// Points s are d-vectors in the region; the implicit coordinate
// s_{d+1} = 1 - sum(s) enters every sum over d+1 cells. Functions documented
// as accepting "d or d+1 coordinates" use a supplied last coordinate verbatim.

#include "mnsurv/covariance.hpp"
#include "mnsurv/model.hpp"

#include <Eigen/Core>

namespace mnsurv {

/// ln(m!). Exact factorial below 21, std::lgamma beyond.
double log_factorial(Count m);

/// lambda_m = ln(m!) - ln(2 pi m)/2 - m ln m + m, with
/// 1/(12m+1) <= lambda_m <= 1/(12m). Direct evaluation for m <= 20, the
/// asymptotic Stirling series (six terms) above, where the direct difference
/// would lose every significant digit.
double stirling_lambda(Count m);

/// Lambda_N = lambda_N - sum_i lambda_{J_i}. Throws InapplicableRoute if some J_i = 0.
double capital_lambda(const SurvivalInstance& instance);

/// gamma~(eps) = sum_i p_i (1+eps_i) ln(1+eps_i) - epsTilde^T Sigma^{-1} epsTilde / 2.
double gamma_tilde(const SurvivalInstance& instance);

/// Cubic plus quartic truncation of gamma~ in epsTilde (no remainder).
double gamma_tilde_series(const SurvivalInstance& instance);

/// Evaluation hooks at an arbitrary perturbation epsTilde (d+1 entries summing
/// to zero, 1 + epsTilde_i/p_i > 0). Used to probe the remainder rate along
/// t * epsTilde without constructing instances.
double gamma_tilde_at(const ProbabilityWeights& weights,
                      const Eigen::Ref<const Eigen::VectorXd>& epsTilde);
double gamma_tilde_series_at(const ProbabilityWeights& weights,
                             const Eigen::Ref<const Eigen::VectorXd>& epsTilde);

/// The double-sum form of epsTilde^T Sigma^{-1} epsTilde / 2 minus the
/// collapsed closed form. Zero up to rounding.
double quadratic_cancellation_residual(const SurvivalInstance& instance);

/// Delta_N = ln{(N+d)!/(N! N^d)} + Lambda_N - sum_i ln(1+eps_i)/2 - N gamma~.
double delta_n(const SurvivalInstance& instance);

/// gamma*(s) = sum_i p_i (1+eps_i) ln(s_i/p_i)
///             - {epsTilde^T Sigma^{-1} (s-p) - (s-p)^T Sigma^{-1} (s-p) / 2}.
double gamma_star(const SurvivalInstance& instance,
                  const Eigen::Ref<const Eigen::VectorXd>& s);

/// sum_i (J_i/N) ln(s_i/p_i) over all d+1 cells.
double entropy_lhs(const SurvivalInstance& instance,
                   const Eigen::Ref<const Eigen::VectorXd>& s);

/// H(s) = sum_i (J_i/N) ln s_i. Accepts d or d+1 coordinates.
double h_value(const SurvivalInstance& instance, const Eigen::Ref<const Eigen::VectorXd>& s);
/// Gradient of H in the d free coordinates; vanishes at s = J/N.
Eigen::VectorXd h_grad(const SurvivalInstance& instance,
                       const Eigen::Ref<const Eigen::VectorXd>& s);
/// Hessian of H in the d free coordinates; negative definite.
Eigen::MatrixXd h_hessian(const SurvivalInstance& instance,
                          const Eigen::Ref<const Eigen::VectorXd>& s);

/// ln of the Dirichlet integrand (N+d)!/prod J_i! * prod s_i^{J_i}. A term with
/// J_i = 0 contributes exactly 0; s_i = 0 with J_i >= 1 gives -infinity.
double log_dirichlet_integrand(const SurvivalInstance& instance,
                               const Eigen::Ref<const Eigen::VectorXd>& s);

/// Delta_N + N gamma*(s) + (d/2) ln N + ln phi_Sigma(sqrt(N) (p - s + epsTilde)).
double log_gaussian_integrand(const SurvivalInstance& instance,
                              const Eigen::Ref<const Eigen::VectorXd>& s);

/// Callable form of log_dirichlet_integrand with the factorial prefactor hoisted.
class DirichletIntegrand {
 public:
  explicit DirichletIntegrand(const SurvivalInstance& instance);
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  double logPrefactor() const { return logPrefactor_; }

 private:
  SurvivalInstance instance_;
  double logPrefactor_;
};

/// All s-independent pieces of the Gaussian representation for one instance.
/// Requires J_i >= 1 for every cell; throws InapplicableRoute otherwise.
class ExpansionContext {
 public:
  explicit ExpansionContext(const SurvivalInstance& instance);

  const SurvivalInstance& instance() const { return instance_; }
  const CovarianceStructure& covariance() const { return cov_; }
  double lambdaN() const { return lambdaN_; }
  const Eigen::VectorXd& lambdaJ() const { return lambdaJ_; }
  double capitalLambda() const { return capitalLambda_; }
  double gammaTilde() const { return gammaTilde_; }
  double deltaN() const { return deltaN_; }

  double gammaStar(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  double logGaussianIntegrand(const Eigen::Ref<const Eigen::VectorXd>& s) const;

 private:
  SurvivalInstance instance_;
  CovarianceStructure cov_;
  Eigen::VectorXd shares_;  // J_i / N, d+1 cells
  double lambdaN_;
  Eigen::VectorXd lambdaJ_;
  double capitalLambda_;
  double gammaTilde_;
  double deltaN_;
};

}  // namespace mnsurv
