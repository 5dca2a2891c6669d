#include "mnsurv/model.hpp"

#include "mnsurv/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace mnsurv {

ProbabilityWeights::ProbabilityWeights(Eigen::VectorXd p) : p_(std::move(p)) {
  if (p_.size() < 1) throw ValidationError("probability vector must be non-empty");
  prefix_.resize(p_.size());
  double running = 0.0;
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (!std::isfinite(p_[i]) || p_[i] <= kWeightMargin) {
      throw ValidationError("p_" + std::to_string(i + 1) + " must be positive");
    }
    running += p_[i];
    prefix_[i] = running;
  }
  last_ = 1.0 - running;
  if (last_ <= kWeightMargin) {
    throw ValidationError("probabilities must sum to less than 1");
  }
}

Eigen::VectorXd ProbabilityWeights::cells() const {
  Eigen::VectorXd out(dim() + 1);
  out.head(dim()) = p_;
  out[dim()] = last_;
  return out;
}

Thresholds::Thresholds(std::vector<Count> k) : k_(std::move(k)) {
  kappa_.reserve(k_.size());
  Count running = 0;
  for (std::size_t i = 0; i < k_.size(); ++i) {
    if (k_[i] < 0) {
      throw ValidationError("k_" + std::to_string(i + 1) + " must be nonnegative");
    }
    running += k_[i];
    kappa_.push_back(running);
  }
}

SurvivalInstance::SurvivalInstance(Count n, ProbabilityWeights weights,
                                   Thresholds thresholds)
    : n_(n), weights_(std::move(weights)), thresholds_(std::move(thresholds)) {
  const int d = weights_.dim();
  if (n_ < 1) throw ValidationError("n must be at least 1");
  if (thresholds_.dim() != d) {
    throw ValidationError("p and k must have the same length");
  }

  j_.resize(d + 1);
  J_.resize(d + 1);
  Count previous = 0;
  for (int i = 0; i < d; ++i) {
    j_[i] = thresholds_.kappa()[i] - previous;
    previous = thresholds_.kappa()[i];
  }
  j_[d] = n_ + 1 - previous;
  for (int i = 0; i <= d; ++i) J_[i] = j_[i] - 1;

  eps_.resize(d + 1);
  epsTilde_.resize(d + 1);
  const Count N = bigN();
  for (int i = 0; i <= d; ++i) {
    if (N <= 0) {
      eps_[i] = epsTilde_[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double pi = weights_.cell(i);
    eps_[i] = (static_cast<double>(J_[i]) / static_cast<double>(N) - pi) / pi;
    epsTilde_[i] = pi * eps_[i];
  }
}

bool SurvivalInstance::hasZeroThreshold() const {
  for (Count k : thresholds_.k()) {
    if (k == 0) return true;
  }
  return false;
}

bool SurvivalInstance::dirichletEligible() const {
  if (enumerationOnly()) return false;
  for (Count j : j_) {
    if (j < 1) return false;
  }
  return true;
}

bool SurvivalInstance::gaussianEligible() const {
  if (bigN() < 1) return false;
  for (Count J : J_) {
    if (J < 1) return false;
  }
  return true;
}

SurvivalInstance build_instance(Count n, const Eigen::VectorXd& p,
                                std::vector<Count> k) {
  if (static_cast<Eigen::Index>(k.size()) != p.size()) {
    throw ValidationError("p and k must have the same length");
  }
  return SurvivalInstance(n, ProbabilityWeights(p), Thresholds(std::move(k)));
}

ReducedThresholds reduce_thresholds(const Eigen::VectorXd& p,
                                    const std::vector<Count>& k) {
  if (static_cast<Eigen::Index>(k.size()) != p.size()) {
    throw ValidationError("p and k must have the same length");
  }
  std::vector<double> keptP;
  std::vector<Count> keptK;
  double carry = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 0) {
      carry += p[static_cast<Eigen::Index>(i)];
      continue;
    }
    keptP.push_back(p[static_cast<Eigen::Index>(i)] + carry);
    keptK.push_back(k[i]);
    carry = 0.0;
  }
  ReducedThresholds out;
  out.p = Eigen::Map<const Eigen::VectorXd>(keptP.data(),
                                            static_cast<Eigen::Index>(keptP.size()));
  out.k = std::move(keptK);
  return out;
}

std::optional<SurvivalInstance> reduce(const SurvivalInstance& instance) {
  if (!instance.hasZeroThreshold()) return instance;
  auto reduced = reduce_thresholds(instance.weights().p(), instance.thresholds().k());
  if (reduced.k.empty()) return std::nullopt;
  return build_instance(instance.n(), reduced.p, std::move(reduced.k));
}

bool region_contains(const ProbabilityWeights& weights,
                     const Eigen::Ref<const Eigen::VectorXd>& s) {
  if (s.size() != weights.dim()) throw ValidationError("dimension mismatch");
  double running = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!(s[i] >= 0.0)) return false;
    running += s[i];
    if (running > weights.prefix()[i]) return false;
  }
  return true;
}

double nested_upper_limit(const ProbabilityWeights& weights, int i,
                          std::span<const double> sPrefix) {
  if (i < 0 || i >= weights.dim()) throw ValidationError("axis index out of range");
  if (static_cast<int>(sPrefix.size()) != i) {
    throw ValidationError("expected one fixed coordinate per earlier axis");
  }
  double running = 0.0;
  for (int m = 0; m < i; ++m) {
    if (!(sPrefix[m] >= 0.0)) throw ValidationError("negative coordinate");
    running += sPrefix[m];
    if (running > weights.prefix()[m]) {
      throw ValidationError("fixed coordinates already leave the region at axis " +
                            std::to_string(m + 1));
    }
  }
  return weights.prefix()[i] - running;
}

Eigen::VectorXd complete_simplex_point(const Eigen::Ref<const Eigen::VectorXd>& s) {
  Eigen::VectorXd out(s.size() + 1);
  out.head(s.size()) = s;
  out[s.size()] = 1.0 - s.sum();
  return out;
}

}  // namespace mnsurv
