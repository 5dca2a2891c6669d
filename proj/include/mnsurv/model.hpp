#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mnsurv {

using Count = std::int64_t;

/// Positivity margin applied to every cell probability, including the
/// implicit last cell.
inline constexpr double kWeightMargin = 1e-12;

/// Cell probabilities p_1..p_d of a multinomial vector. The (d+1)-th cell is
/// implicit: pLast = 1 - sum(p). Indices are 0-based throughout the library,
/// so index d refers to the implicit cell.
class ProbabilityWeights {
 public:
  /// Throws ValidationError unless every p_i > margin and pLast > margin.
  explicit ProbabilityWeights(Eigen::VectorXd p);

  int dim() const { return static_cast<int>(p_.size()); }
  const Eigen::VectorXd& p() const { return p_; }
  double last() const { return last_; }
  /// Cell probability for i in [0, d]; i == d is the implicit cell.
  double cell(int i) const { return i == dim() ? last_ : p_[i]; }
  /// All d+1 cell probabilities.
  Eigen::VectorXd cells() const;
  /// P_i = p_1 + ... + p_i, strictly increasing, prefix[d-1] = 1 - pLast.
  const Eigen::VectorXd& prefix() const { return prefix_; }

 private:
  Eigen::VectorXd p_;
  double last_;
  Eigen::VectorXd prefix_;
};

/// Thresholds k and their running sums kappa_i = k_1 + ... + k_i.
class Thresholds {
 public:
  explicit Thresholds(std::vector<Count> k);

  int dim() const { return static_cast<int>(k_.size()); }
  const std::vector<Count>& k() const { return k_; }
  const std::vector<Count>& kappa() const { return kappa_; }
  /// kappa_d, or 0 when there are no thresholds.
  Count total() const { return kappa_.empty() ? 0 : kappa_.back(); }

 private:
  std::vector<Count> k_;
  std::vector<Count> kappa_;
};

/// The event {X_1 + ... + X_i >= kappa_i for all i} for X ~ Multinomial(n, p),
/// together with every derived quantity of the integral representations.
///
/// With N = n - d, the gaps j_i = kappa_i - kappa_{i-1} (i <= d) and
/// j_{d+1} = n + 1 - kappa_d sum to n + 1, and J_i = j_i - 1 sum to N.
/// eps_i = (J_i/N - p_i)/p_i and epsTilde_i = J_i/N - p_i are stored for all
/// d+1 cells (NaN when N <= 0).
class SurvivalInstance {
 public:
  SurvivalInstance(Count n, ProbabilityWeights weights, Thresholds thresholds);

  int dim() const { return weights_.dim(); }
  Count n() const { return n_; }
  Count bigN() const { return n_ - dim(); }
  const ProbabilityWeights& weights() const { return weights_; }
  const Thresholds& thresholds() const { return thresholds_; }
  const std::vector<Count>& gaps() const { return j_; }
  const std::vector<Count>& shiftedGaps() const { return J_; }
  const Eigen::VectorXd& eps() const { return eps_; }
  const Eigen::VectorXd& epsTilde() const { return epsTilde_; }

  /// kappa_d > n: the event is empty.
  bool impossible() const { return thresholds_.total() > n_; }
  /// n < d: only enumeration and simulation apply.
  bool enumerationOnly() const { return n_ < dim(); }
  bool hasZeroThreshold() const;
  /// Every gap j_i >= 1, so the Dirichlet integrand is well defined.
  bool dirichletEligible() const;
  /// Every shifted gap J_i >= 1, so Stirling errors and ln(1 + eps_i) exist.
  bool gaussianEligible() const;

 private:
  Count n_;
  ProbabilityWeights weights_;
  Thresholds thresholds_;
  std::vector<Count> j_;
  std::vector<Count> J_;
  Eigen::VectorXd eps_;
  Eigen::VectorXd epsTilde_;
};

SurvivalInstance build_instance(Count n, const Eigen::VectorXd& p,
                                std::vector<Count> k);

struct ReducedThresholds {
  Eigen::VectorXd p;
  std::vector<Count> k;
};

/// Drops every zero threshold by merging its cell into the next one (a
/// trailing zero merges into the implicit cell). The grouped vector is again
/// multinomial and the event is unchanged because X_i >= 0.
ReducedThresholds reduce_thresholds(const Eigen::VectorXd& p,
                                    const std::vector<Count>& k);

/// Reduced instance, or nullopt when every constraint was vacuous (the
/// survival probability is then 1).
std::optional<SurvivalInstance> reduce(const SurvivalInstance& instance);

/// Membership in R_d: s >= 0 and s_1 + ... + s_i <= P_i for every i.
bool region_contains(const ProbabilityWeights& weights,
                     const Eigen::Ref<const Eigen::VectorXd>& s);

/// Upper limit of axis i (0-based) of the iterated integral over R_d given the
/// already fixed coordinates s_0..s_{i-1}: P_i - (s_0 + ... + s_{i-1}).
double nested_upper_limit(const ProbabilityWeights& weights, int i,
                          std::span<const double> sPrefix);

/// Appends the implicit coordinate 1 - sum(s).
Eigen::VectorXd complete_simplex_point(const Eigen::Ref<const Eigen::VectorXd>& s);

}  // namespace mnsurv
