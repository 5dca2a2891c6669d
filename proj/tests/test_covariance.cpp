#include "mnsurv/covariance.hpp"
#include "support.hpp"

#include <Eigen/LU>

#include <doctest.h>

#include <numbers>

using namespace mnsurv;
using mnsurv::testing::vec;

namespace {

// Determinant by Gaussian elimination with partial pivoting.
double eliminate_determinant(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  double det = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    }
    if (pivot != c) {
      a.row(pivot).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

}  // namespace

TEST_CASE("sigma matrix entries") {
  const ProbabilityWeights w(vec({0.2, 0.5}));
  const Eigen::MatrixXd s = sigma_matrix(w);
  CHECK(s(0, 0) == doctest::Approx(0.2 - 0.04));
  CHECK(s(1, 1) == doctest::Approx(0.5 - 0.25));
  CHECK(s(0, 1) == doctest::Approx(-0.1));
  CHECK(s(0, 1) == s(1, 0));
}

TEST_CASE("sigma_inverse_entry") {
  const ProbabilityWeights one(vec({0.5}));
  CHECK(sigma_inverse_entry(one, 0, 0) == doctest::Approx(4.0));

  const ProbabilityWeights two(vec({0.3, 0.3}));
  CHECK(sigma_inverse_entry(two, 0, 0) == doctest::Approx(35.0 / 6.0));
  CHECK(sigma_inverse_entry(two, 0, 1) == doctest::Approx(2.5));
  CHECK(sigma_inverse_entry(two, 1, 0) == sigma_inverse_entry(two, 0, 1));
  // direct 2x2 product with the closed-form entries
  const Eigen::Matrix2d sigma = sigma_matrix(two);
  Eigen::Matrix2d inv;
  inv << 35.0 / 6.0, 2.5, 2.5, 35.0 / 6.0;
  CHECK((sigma * inv - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(sigma_inverse_entry(two, 2, 0), ValidationError);
}

TEST_CASE("quad_form") {
  const ProbabilityWeights one(vec({0.5}));
  CHECK(quad_form(one, vec({0.0})) == 0.0);
  CHECK(quad_form(one, vec({0.1})) == doctest::Approx(0.04));

  const ProbabilityWeights two(vec({0.3, 0.3}));
  const Eigen::VectorXd x = vec({0.1, -0.1});
  const double viaMatrix = x.dot(sigma_inverse(two) * x);
  CHECK(viaMatrix == doctest::Approx(1.0 / 15.0).epsilon(1e-13));
  CHECK(quad_form(two, x) == doctest::Approx(1.0 / 15.0).epsilon(1e-13));
  CHECK_THROWS_AS(quad_form(two, vec({0.1})), ValidationError);
}

TEST_CASE("quad_form matches the explicit inverse and is positive") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 6;
    const ProbabilityWeights w(testing::random_weights(rng, d));
    const Eigen::VectorXd x = Eigen::VectorXd::Random(d);
    const double explicitForm = x.dot(sigma_matrix(w).inverse() * x);
    CHECK(quad_form(w, x) == doctest::Approx(explicitForm).epsilon(1e-11));
    CHECK(quad_form(w, x) > 0.0);
  }
}

TEST_CASE("log_mvn_density") {
  const ProbabilityWeights one(vec({0.5}));
  CHECK(log_mvn_density(one, vec({0.0})) ==
        doctest::Approx(-0.22579135264472743236).epsilon(1e-14));

  const ProbabilityWeights two(vec({0.3, 0.3}));
  CHECK(log_mvn_density(two, vec({0.0, 0.0})) ==
        doctest::Approx(-0.17575889614633195835).epsilon(1e-14));

  testing::Rng rng(9);
  const double peak = log_mvn_density(two, vec({0.0, 0.0}));
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd x = Eigen::VectorXd::Random(2);
    CHECK(log_mvn_density(two, x) < peak);
  }
}

TEST_CASE("density integrates to one") {
  // Importance sampling from a wide uniform box, d = 1 and d = 2.
  testing::Rng rng(21);
  for (const auto& p : {vec({0.5}), vec({0.3, 0.3})}) {
    const ProbabilityWeights w(p);
    const int d = w.dim();
    const double half = 2.5;
    const int samples = 1000000;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
      Eigen::VectorXd x(d);
      for (int j = 0; j < d; ++j) x[j] = (2.0 * testing::uniform01(rng) - 1.0) * half;
      sum += std::exp(log_mvn_density(w, x));
    }
    const double integral = sum / samples * std::pow(2.0 * half, d);
    CHECK(integral == doctest::Approx(1.0).epsilon(0.015));
  }
}

TEST_CASE("closed-form determinant and inverse agree with elimination") {
  testing::Rng rng(13);
  for (int trial = 0; trial < 120; ++trial) {
    const int d = 1 + trial % 8;
    const ProbabilityWeights w(testing::random_weights(rng, d));
    const Eigen::MatrixXd sigma = sigma_matrix(w);
    const double closed = std::exp(log_det_sigma(w));
    CHECK(std::abs(eliminate_determinant(sigma) - closed) / closed <= 1e-12);
    CHECK((sigma * sigma_inverse(w) - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <=
          1e-10);
    const CovarianceStructure cov(w);
    CHECK(cov.logDet == log_det_sigma(w));
    CHECK((cov.sigma - cov.sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("templated on the scalar type") {
  const ProbabilityWeights w(vec({0.3, 0.3}));
  const Eigen::Matrix<long double, 2, 1> x(0.1L, -0.1L);
  CHECK(static_cast<double>(quad_form(w, x)) == doctest::Approx(1.0 / 15.0));
  const auto sigmaF = sigma_matrix<float>(w);
  CHECK(sigmaF(0, 1) == doctest::Approx(-0.09f));
}
