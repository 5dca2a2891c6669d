#include "mnsurv/checks.hpp"

#include "mnsurv/covariance.hpp"
#include "mnsurv/expansions.hpp"
#include "mnsurv/survival.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mnsurv {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

Eigen::VectorXd random_weights(Rng& rng, int d) {
  // Uniform spacings of [0, 1] with a floor on every cell.
  Eigen::VectorXd cells(d + 1);
  for (int i = 0; i <= d; ++i) cells[i] = 0.05 + uniform(rng);
  cells /= cells.sum();
  return cells.head(d);
}

// Random instance with J_i >= 1 in every cell.
SurvivalInstance random_gaussian_instance(Rng& rng, int d, Count maxN) {
  const Eigen::VectorXd p = random_weights(rng, d);
  const Count N = d + 1 + static_cast<Count>(uniform(rng) * static_cast<double>(maxN - d));
  std::vector<Count> J(d + 1, 1);
  for (Count extra = N - (d + 1); extra > 0; --extra) {
    ++J[static_cast<std::size_t>(uniform(rng) * (d + 1))];
  }
  std::vector<Count> k(d);
  for (int i = 0; i < d; ++i) k[i] = J[i] + 1;
  return build_instance(N + d, p, k);
}

Eigen::VectorXd random_interior_point(Rng& rng, const ProbabilityWeights& w) {
  Eigen::VectorXd s(w.dim());
  double fixed = 0.0;
  for (int i = 0; i < w.dim(); ++i) {
    s[i] = (w.prefix()[i] - fixed) * uniform(rng);
    fixed += s[i];
  }
  return s;
}

Eigen::VectorXd shares(const SurvivalInstance& inst) {
  Eigen::VectorXd w(inst.dim() + 1);
  for (int i = 0; i <= inst.dim(); ++i) {
    w[i] = static_cast<double>(inst.shiftedGaps()[static_cast<std::size_t>(i)]) /
           static_cast<double>(inst.bigN());
  }
  return w;
}

double relative_error(double value, double reference) {
  return reference == 0.0 ? std::abs(value) : std::abs(value - reference) / std::abs(reference);
}

std::vector<SurvivalInstance> route_panel() {
  std::vector<SurvivalInstance> panel;
  auto add = [&](Count n, std::initializer_list<double> p, std::vector<Count> k) {
    Eigen::VectorXd pv(static_cast<Eigen::Index>(p.size()));
    std::copy(p.begin(), p.end(), pv.begin());
    panel.push_back(build_instance(n, pv, std::move(k)));
  };
  add(10, {0.3}, {3});
  add(4, {0.5}, {2});
  add(10, {0.3, 0.3}, {2, 3});
  add(12, {0.3, 0.3}, {3, 4});
  add(20, {0.2, 0.5}, {4, 9});
  add(20, {0.2, 0.5}, {2, 2});
  add(12, {0.2, 0.3, 0.25}, {2, 3, 2});
  add(15, {0.1, 0.2, 0.3}, {2, 2, 5});
  return panel;
}

}  // namespace

std::vector<CheckResult> run_check_suite(const CheckOptions& options) {
  std::vector<CheckResult> results;
  auto record = [&](std::string name, double residual, double tolerance) {
    results.push_back({std::move(name), residual, tolerance, residual <= tolerance});
  };
  Rng rng(options.seed);

  {
    double worst = 0.0;
    auto probe = [&](Count m) {
      const double lam = stirling_lambda(m);
      const double lo = 1.0 / (12.0 * static_cast<double>(m) + 1.0);
      const double hi = 1.0 / (12.0 * static_cast<double>(m));
      worst = std::max({worst, lo - lam, lam - hi});
    };
    for (Count m = 1; m <= 1000; ++m) probe(m);
    probe(1000000);
    record("stirling_lambda_bounds", worst, 0.0);
  }

  {
    double detWorst = 0.0;
    double invWorst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int d = 1 + trial % 6;
      const ProbabilityWeights w(random_weights(rng, d));
      const Eigen::MatrixXd sigma = sigma_matrix(w);
      const double closed = std::exp(log_det_sigma(w));
      detWorst = std::max(detWorst, relative_error(sigma.partialPivLu().determinant(), closed));
      const Eigen::MatrixXd product = sigma * sigma_inverse(w);
      invWorst = std::max(
          invWorst, (product - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff());
    }
    record("sigma_determinant", detWorst, 1e-10);
    record("sigma_inverse", invWorst, 1e-10);
  }

  std::vector<SurvivalInstance> randomInstances;
  for (int trial = 0; trial < 20; ++trial) {
    randomInstances.push_back(random_gaussian_instance(rng, 1 + trial % 3, 60));
  }

  {
    double cancel = 0.0, entropy1 = 0.0, entropy2 = 0.0, integrand = 0.0;
    double gradient = 0.0, curvature = -std::numeric_limits<double>::infinity();
    double maxDiff = 0.0, decomposition = 0.0;
    for (const auto& inst : randomInstances) {
      const auto& w = inst.weights();
      const int d = inst.dim();
      const Eigen::VectorXd e = inst.epsTilde().head(d);
      const double quad = quad_form(w, e);
      const double gt = gamma_tilde(inst);
      const Eigen::VectorXd sh = shares(inst);

      cancel = std::max(cancel, std::abs(quadratic_cancellation_residual(inst)) /
                                    std::max(0.5 * quad, 1e-300));

      double kl = 0.0;
      for (int i = 0; i <= d; ++i) kl += sh[i] * std::log(w.cell(i) / sh[i]);
      entropy1 = std::max(entropy1, std::abs(kl + 0.5 * quad + gt));

      const double hp = h_value(inst, w.p());
      const double hj = h_value(inst, sh);
      maxDiff = std::max(maxDiff, std::abs((hp - hj) - (-0.5 * quad - gt)));

      gradient = std::max(gradient, h_grad(inst, sh).cwiseAbs().maxCoeff());

      const ExpansionContext ctx(inst);
      const DirichletIntegrand dir(inst);
      const double N = static_cast<double>(inst.bigN());
      for (int point = 0; point < 100; ++point) {
        const Eigen::VectorXd s = random_interior_point(rng, w);
        const Eigen::VectorXd mid = s - sh.head(d);
        entropy2 = std::max(entropy2, std::abs(entropy_lhs(inst, s) -
                                               (0.5 * quad - 0.5 * quad_form(w, mid) +
                                                ctx.gammaStar(s))));
        integrand = std::max(integrand, std::abs(dir(s) - ctx.logGaussianIntegrand(s)));
        const double hs = h_value(inst, s);
        const double lhs = N * (hs - hp) + N * (hp - hj);
        decomposition = std::max(decomposition, std::abs(lhs - N * (hs - hj)) /
                                                    std::max(1.0, std::abs(N * (hs - hj))));

        const Eigen::MatrixXd hess = h_hessian(inst, s);
        for (int z = 0; z < 10; ++z) {
          Eigen::VectorXd dir_z(d);
          for (int i = 0; i < d; ++i) dir_z[i] = uniform(rng) - 0.5;
          curvature = std::max(curvature, dir_z.dot(hess * dir_z) / dir_z.squaredNorm());
        }
      }
    }
    const double tol = options.identityTolerance;
    record("quadratic_cancellation", cancel, 1e-14);
    record("entropy_identity_kl", entropy1, tol);
    record("entropy_identity_shift", entropy2, tol);
    record("integrand_equality", integrand, tol);
    record("h_max_difference", maxDiff, tol);
    record("h_decomposition", decomposition, tol);
    record("h_gradient_at_mode", gradient, 0.0);
    results.push_back({"h_hessian_negative_definite", curvature, 0.0, curvature < 0.0});
  }

  {
    const auto spec = QuadratureSpec::gauss_legendre(options.nodes);
    double dirWorst = 0.0, gaussWorst = 0.0;
    for (const auto& inst : route_panel()) {
      const double exact = survival_exact(inst);
      dirWorst = std::max(dirWorst, relative_error(survival_dirichlet(inst, spec), exact));
      gaussWorst = std::max(gaussWorst, relative_error(survival_gaussian(inst, spec), exact));
    }
    record("route_agreement_dirichlet", dirWorst, options.routeTolerance);
    record("route_agreement_gaussian", gaussWorst, options.routeTolerance);
  }

  {
    double binomial = 0.0, monotone = 0.0, reduction = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int d = 1 + trial % 3;
      const Count n = 1 + static_cast<Count>(uniform(rng) * 12);
      const Eigen::VectorXd p = random_weights(rng, d);
      std::vector<Count> k(d);
      for (auto& ki : k) ki = static_cast<Count>(uniform(rng) * 4);
      const auto inst = build_instance(n, p, k);
      const double base = survival_exact(inst);

      const int axis = static_cast<int>(uniform(rng) * d);
      auto bumped = k;
      ++bumped[static_cast<std::size_t>(axis)];
      monotone = std::max(monotone, survival_exact(build_instance(n, p, bumped)) - base);

      const auto reduced = reduce(inst);
      reduction = std::max(reduction, std::abs((reduced ? survival_exact(*reduced) : 1.0) - base));

      if (d == 1) {
        double tail = 0.0;
        for (Count x = k[0]; x <= n; ++x) {
          tail += std::exp(log_factorial(n) - log_factorial(x) - log_factorial(n - x) +
                           static_cast<double>(x) * std::log(p[0]) +
                           static_cast<double>(n - x) * std::log1p(-p[0]));
        }
        binomial = std::max(binomial, relative_error(base, tail));
      }
    }
    record("binomial_reduction", binomial, 1e-12);
    record("monotonicity", std::max(0.0, monotone), 1e-12);
    record("zero_threshold_reduction", reduction, 1e-12);
  }
  return results;
}

}  // namespace mnsurv
