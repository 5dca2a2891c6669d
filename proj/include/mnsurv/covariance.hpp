#pragma once

// Closed-form algebra for Sigma_p = diag(p) - p p^T, the covariance kernel of
// a Multinomial(1, p) vector. Inverse and determinant are never computed
// numerically:
//   (Sigma_p^{-1})_{ij} = 1(i=j)/p_i + 1/p_{d+1},   det Sigma_p = p_1 ... p_{d+1}.

#include "mnsurv/errors.hpp"
#include "mnsurv/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <utility>

namespace mnsurv {

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sigma_matrix(
    const ProbabilityWeights& weights) {
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p = weights.p().template cast<Scalar>();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sigma = -p * p.transpose();
  sigma.diagonal() += p;
  return sigma;
}

inline double sigma_inverse_entry(const ProbabilityWeights& weights, int i, int j) {
  const int d = weights.dim();
  if (i < 0 || j < 0 || i >= d || j >= d) throw ValidationError("index out of range");
  return (i == j ? 1.0 / weights.p()[i] : 0.0) + 1.0 / weights.last();
}

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sigma_inverse(
    const ProbabilityWeights& weights) {
  const int d = weights.dim();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> inv =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Constant(
          d, d, Scalar(1) / Scalar(weights.last()));
  for (int i = 0; i < d; ++i) inv(i, i) += Scalar(1) / Scalar(weights.p()[i]);
  return inv;
}

/// ln det Sigma_p = sum over all d+1 cells of ln p_i.
inline double log_det_sigma(const ProbabilityWeights& weights) {
  return weights.p().array().log().sum() + std::log(weights.last());
}

/// x^T Sigma_p^{-1} y in O(d): sum x_i y_i / p_i + (sum x)(sum y) / p_{d+1}.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar bilinear_form(const ProbabilityWeights& weights,
                                        const Eigen::MatrixBase<DerivedX>& x,
                                        const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != weights.dim() || y.size() != weights.dim()) {
    throw ValidationError("dimension mismatch");
  }
  Scalar diag(0), sx(0), sy(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    diag += x[i] * y[i] / Scalar(weights.p()[i]);
    sx += x[i];
    sy += y[i];
  }
  return diag + sx * sy / Scalar(weights.last());
}

template <typename Derived>
typename Derived::Scalar quad_form(const ProbabilityWeights& weights,
                                   const Eigen::MatrixBase<Derived>& x) {
  return bilinear_form(weights, x, x);
}

/// ln phi_{Sigma_p}(x), the centered normal log-density with covariance Sigma_p.
template <typename Derived>
typename Derived::Scalar log_mvn_density(const ProbabilityWeights& weights,
                                         const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar d(weights.dim());
  return -quad_form(weights, x) / Scalar(2) -
         (d * Scalar(std::log(2.0 * std::numbers::pi)) + Scalar(log_det_sigma(weights))) /
             Scalar(2);
}

struct CovarianceStructure {
  ProbabilityWeights weights;
  Eigen::MatrixXd sigma;
  double logDet;

  explicit CovarianceStructure(ProbabilityWeights w)
      : weights(std::move(w)), sigma(sigma_matrix(weights)), logDet(log_det_sigma(weights)) {}

  template <typename Derived>
  double quadForm(const Eigen::MatrixBase<Derived>& x) const {
    return quad_form(weights, x);
  }
  template <typename Derived>
  double logDensity(const Eigen::MatrixBase<Derived>& x) const {
    return log_mvn_density(weights, x);
  }
};

}  // namespace mnsurv
