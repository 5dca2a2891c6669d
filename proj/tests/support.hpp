#pragma once

// Shared generators and brute-force oracles for the test binaries. Nothing
// here calls into the routes it is used to check.

#include "mnsurv/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <algorithm>
#include <random>
#include <vector>

namespace mnsurv::testing {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline Eigen::VectorXd random_weights(Rng& rng, int d, double floor = 0.05) {
  Eigen::VectorXd cells(d + 1);
  for (int i = 0; i <= d; ++i) cells[i] = floor + uniform01(rng);
  cells /= cells.sum();
  return cells.head(d);
}

/// Instance with J_i >= 1 in every cell and N <= maxN.
inline SurvivalInstance random_gaussian_instance(Rng& rng, int d, Count maxN) {
  const Eigen::VectorXd p = random_weights(rng, d);
  std::uniform_int_distribution<Count> pickN(d + 1, maxN);
  const Count N = pickN(rng);
  std::vector<Count> J(d + 1, 1);
  std::uniform_int_distribution<int> cell(0, d);
  for (Count extra = N - (d + 1); extra > 0; --extra) ++J[static_cast<std::size_t>(cell(rng))];
  std::vector<Count> k(J.begin(), J.end() - 1);
  for (auto& v : k) v += 1;
  return build_instance(N + d, p, k);
}

/// Instance whose shares J_i/N sit within a relative distance maxEps of p_i,
/// so every |eps_i| <= maxEps.
inline SurvivalInstance random_near_mode_instance(Rng& rng, int d, double maxEps) {
  while (true) {
    const Eigen::VectorXd p = random_weights(rng, d, 0.3);
    std::uniform_int_distribution<Count> pickN(100, 600);
    const Count N = pickN(rng);
    std::vector<Count> J(d + 1);
    Count used = 0;
    for (int i = 0; i < d; ++i) {
      const double target = static_cast<double>(N) * p[i] * (1.0 + (2.0 * uniform01(rng) - 1.0) * 0.8 * maxEps);
      J[i] = std::max<Count>(1, std::llround(target));
      used += J[i];
    }
    J[d] = N - used;
    if (J[d] < 1) continue;
    std::vector<Count> k(J.begin(), J.end() - 1);
    for (auto& v : k) v += 1;
    auto inst = build_instance(N + d, p, k);
    if (inst.eps().cwiseAbs().maxCoeff() <= maxEps) return inst;
  }
}

/// Point strictly inside R_d.
inline Eigen::VectorXd random_interior_point(Rng& rng, const ProbabilityWeights& w) {
  Eigen::VectorXd s(w.dim());
  double fixed = 0.0;
  for (int i = 0; i < w.dim(); ++i) {
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    s[i] = (w.prefix()[i] - fixed) * u;
    fixed += s[i];
  }
  return s;
}

/// P(X_1 + ... + X_i >= kappa_i for all i) by visiting every x in {0..n}^d and
/// multiplying out the pmf in long double. Independent of the library's
/// pruned log-space enumeration.
inline double brute_force_survival(Count n, const Eigen::VectorXd& p, const std::vector<Count>& k) {
  const int d = static_cast<int>(p.size());
  long double last = 1.0L;
  for (int i = 0; i < d; ++i) last -= p[i];
  auto factorial = [](Count m) {
    long double f = 1.0L;
    for (Count i = 2; i <= m; ++i) f *= static_cast<long double>(i);
    return f;
  };
  std::vector<Count> x(d, 0);
  long double total = 0.0L;
  while (true) {
    Count sum = 0;
    bool ok = true;
    Count kappa = 0;
    for (int i = 0; i < d; ++i) {
      sum += x[i];
      kappa += k[i];
      if (sum < kappa) ok = false;
    }
    if (sum <= n && ok) {
      long double term = factorial(n) / factorial(n - sum);
      for (int i = 0; i < d; ++i) {
        term *= std::pow(static_cast<long double>(p[i]), static_cast<long double>(x[i])) /
                factorial(x[i]);
      }
      term *= std::pow(last, static_cast<long double>(n - sum));
      total += term;
    }
    int i = 0;
    while (i < d && ++x[i] > n) x[i++] = 0;
    if (i == d) break;
  }
  return static_cast<double>(total);
}

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace mnsurv::testing
