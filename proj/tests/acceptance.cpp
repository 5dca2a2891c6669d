// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "mnsurv/covariance.hpp"
#include "mnsurv/expansions.hpp"
#include "mnsurv/survival.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace mnsurv;
using mnsurv::testing::vec;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limitSeconds, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limitSeconds > 0.0 && elapsed >= limitSeconds) {
    v.pass = false;
    v.detail += " (over time limit)";
  }
  if (!v.pass) ++failures;
  std::printf("%s  %2d %-28s %s [%.2fs]\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(),
              elapsed);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Eigen::VectorXd shares(const SurvivalInstance& inst) {
  Eigen::VectorXd s(inst.dim() + 1);
  for (int i = 0; i <= inst.dim(); ++i) {
    s[i] = static_cast<double>(inst.shiftedGaps()[static_cast<std::size_t>(i)]) /
           static_cast<double>(inst.bigN());
  }
  return s;
}

// Determinant by Gaussian elimination with partial pivoting.
double elimination_det(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  double det = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
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

Verdict binomial_reduction() {
  const auto inst = build_instance(10, vec({0.3}), {3});
  long double tail = 0.0L;
  for (int x = 3; x <= 10; ++x) {
    long double c = 1.0L;
    for (int i = 0; i < x; ++i) c = c * (10 - i) / (i + 1);
    tail += c * std::pow(0.3L, x) * std::pow(0.7L, 10 - x);
  }
  const double truth = static_cast<double>(tail);
  const auto spec = QuadratureSpec::gauss_legendre(64);
  const double e = rel(survival_exact(inst), truth);
  const double d = std::abs(survival_dirichlet(inst, spec) - truth);
  if (inst.shiftedGaps() != std::vector<Count>{2, 7}) return {false, "unexpected J"};
  const double g = std::abs(survival_gaussian(inst, spec) - truth);
  return {e <= 1e-12 && d <= 1e-10 && g <= 1e-8,
          fmt("exact rel %.2e, dirichlet %.2e, ", e, d) + fmt("gaussian %.2e", g)};
}

Verdict d2_panel() {
  const auto spec = QuadratureSpec::gauss_legendre(48);
  double worstD = 0.0, worstG = 0.0;
  int count = 0;
  for (Count n : {5, 10, 20}) {
    for (const auto& p : {vec({0.3, 0.3}), vec({0.2, 0.5})}) {
      for (Count k1 = 2; k1 <= n; ++k1) {
        for (Count k2 = 2; k1 + k2 <= n - 1; ++k2) {
          const auto inst = build_instance(n, p, {k1, k2});
          const double exact = survival_exact(inst);
          worstD = std::max(worstD, rel(survival_dirichlet(inst, spec), exact));
          worstG = std::max(worstG, rel(survival_gaussian(inst, spec), exact));
          ++count;
        }
      }
    }
  }
  return {worstD <= 1e-8 && worstG <= 1e-6,
          std::to_string(count) + " instances, " + fmt("dirichlet %.2e, gaussian %.2e", worstD, worstG)};
}

Verdict d3_smoke() {
  const auto inst = build_instance(12, vec({0.2, 0.3, 0.25}), {2, 3, 2});
  const auto spec = QuadratureSpec::gauss_legendre(32);
  const double e = survival_exact(inst);
  const double d = survival_dirichlet(inst, spec);
  const double g = survival_gaussian(inst, spec);
  const double worst = std::max({std::abs(e - d) / std::max(e, d), std::abs(e - g) / std::max(e, g),
                                 std::abs(d - g) / std::max(d, g)});
  return {worst <= 1e-6, fmt("value %.12f, max pairwise rel %.2e", e, worst)};
}

Verdict monte_carlo() {
  const auto inst = build_instance(10, vec({0.3}), {3});
  const double exact = survival_exact(inst);
  bool ok = true;
  double worst = 0.0;
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    const auto est = survival_mc(inst, 1000000, seed);
    const double z = std::abs(est.estimate - exact) / est.standardError;
    worst = std::max(worst, z);
    ok = ok && z <= 4.0;
  }
  return {ok, fmt("max |z| %.2f over 3 seeds", worst)};
}

Verdict stirling() {
  bool ok = true;
  auto inside = [](Count m) {
    const double l = stirling_lambda(m);
    const double md = static_cast<double>(m);
    return l >= 1.0 / (12.0 * md + 1.0) && l <= 1.0 / (12.0 * md);
  };
  for (Count m = 1; m <= 1000; ++m) ok = ok && inside(m);
  ok = ok && inside(1000000);
  const double l1 = std::abs(stirling_lambda(1) - (1.0 - 0.5 * std::log(2.0 * std::numbers::pi)));
  return {ok && l1 <= 1e-14, std::string(ok ? "bounds hold" : "bounds violated") + fmt(", |lambda_1 error| %.2e", l1)};
}

Verdict pointwise_identity() {
  testing::Rng rng(606);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testing::random_gaussian_instance(rng, 1 + trial % 4, 200);
    for (int point = 0; point < 100; ++point) {
      const Eigen::VectorXd s = testing::random_interior_point(rng, inst.weights());
      worst = std::max(worst, std::abs(log_dirichlet_integrand(inst, s) - log_gaussian_integrand(inst, s)));
    }
  }
  return {worst <= 1e-10, fmt("max |difference| %.2e", worst)};
}

Verdict identity_suite() {
  testing::Rng rng(707);
  double quad = 0.0, ent1 = 0.0, ent2 = 0.0, hdiff = 0.0, grad = 0.0;
  bool negative = true;
  int zCount = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testing::random_gaussian_instance(rng, 1 + trial % 4, 150);
    const auto& w = inst.weights();
    const int d = inst.dim();
    const Eigen::VectorXd e = inst.epsTilde().head(d);
    const Eigen::VectorXd mode = shares(inst);
    const Eigen::VectorXd jn = mode.head(d);

    const double scale = 0.5 * quad_form(w, e);
    if (scale > 0.0) quad = std::max(quad, std::abs(quadratic_cancellation_residual(inst)) / scale);

    for (int point = 0; point < 10; ++point) {
      const Eigen::VectorXd s = testing::random_interior_point(rng, w);
      const Eigen::VectorXd diff = s - w.p();
      const double lhs = entropy_lhs(inst, s);
      ent1 = std::max(ent1, std::abs(lhs - (bilinear_form(w, e, diff) - 0.5 * quad_form(w, diff) +
                                            gamma_star(inst, s))));
      ent2 = std::max(ent2, std::abs(lhs - (scale - 0.5 * quad_form(w, Eigen::VectorXd(s - jn)) +
                                            gamma_star(inst, s))));
    }

    hdiff = std::max(hdiff, std::abs(h_value(inst, w.p()) - h_value(inst, mode) -
                                     (-scale - gamma_tilde(inst))));
    grad = std::max(grad, h_grad(inst, mode).cwiseAbs().maxCoeff());

    const Eigen::MatrixXd H = h_hessian(inst, testing::random_interior_point(rng, w));
    for (int z = 0; z < 10; ++z, ++zCount) {
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) v[i] = 2.0 * testing::uniform01(rng) - 1.0;
      negative = negative && v.dot(H * v) < 0.0;
    }
  }
  const bool ok = quad <= 1e-14 && ent1 <= 1e-12 && ent2 <= 1e-12 && hdiff <= 1e-12 &&
                  grad == 0.0 && negative && zCount >= 1000;
  return {ok, fmt("quad %.1e, entropy %.1e/", quad, ent1) + fmt("%.1e, H diff %.1e, ", ent2, hdiff) +
                  fmt("grad %.0e, zHz<0 on %g z", grad, zCount) + (negative ? "" : " (violated)")};
}

Verdict remainder_rates() {
  testing::Rng rng(808);
  double loG = 1e300, hiG = 0.0, loS = 1e300, hiS = 0.0;
  int tested = 0;
  while (tested < 20) {
    const auto inst = testing::random_near_mode_instance(rng, 1 + tested % 3, 0.3);
    const auto& w = inst.weights();
    // direction with max_i |eps_i| = 1, so t is the size of the perturbation
    const Eigen::VectorXd e = inst.epsTilde() / inst.eps().cwiseAbs().maxCoeff();
    double c5 = 0.0, c5abs = 0.0;
    for (int i = 0; i <= inst.dim(); ++i) {
      const double term = std::pow(e[i], 5) / std::pow(w.cell(i), 4);
      c5 += term;
      c5abs += std::abs(term);
    }
    if (std::abs(c5) < 0.25 * c5abs) continue;
    auto r = [&](double t) {
      const Eigen::VectorXd scaled = t * e;
      return std::abs(gamma_tilde_at(w, scaled) - gamma_tilde_series_at(w, scaled));
    };
    for (double t : {0.2, 0.1}) {
      const double ratio = r(t) / r(t / 2);
      loG = std::min(loG, ratio);
      hiG = std::max(hiG, ratio);
    }
    ++tested;
  }
  tested = 0;
  while (tested < 20) {
    const auto inst = testing::random_gaussian_instance(rng, 1 + tested % 3, 60);
    const auto& w = inst.weights();
    const int d = inst.dim();
    Eigen::VectorXd u(d);
    for (int i = 0; i < d; ++i) u[i] = (testing::uniform01(rng) - 0.5) * w.p()[i];
    Eigen::VectorXd relative(d + 1);
    for (int i = 0; i < d; ++i) relative[i] = u[i] / w.p()[i];
    relative[d] = -u.sum() / w.last();
    const double spread = relative.cwiseAbs().maxCoeff() / 0.4;
    u /= spread;
    relative /= spread;
    const Eigen::VectorXd sh = shares(inst);
    double c3 = 0.0, c3abs = 0.0;
    for (int i = 0; i <= d; ++i) {
      const double term = sh[i] * std::pow(relative[i], 3) / 3.0;
      c3 += term;
      c3abs += std::abs(term);
    }
    if (std::abs(c3) < 0.25 * c3abs) continue;
    auto r = [&](double t) {
      const Eigen::VectorXd full = complete_simplex_point(Eigen::VectorXd(w.p() + t * u));
      double quadratic = 0.0;
      for (int i = 0; i <= d; ++i) {
        const double delta = (full[i] - w.cell(i)) / w.cell(i);
        quadratic += inst.epsTilde()[i] * delta * delta;
      }
      return std::abs(gamma_star(inst, full.head(d)) + 0.5 * quadratic);
    };
    for (double t : {0.2, 0.1}) {
      const double ratio = r(t) / r(t / 2);
      loS = std::min(loS, ratio);
      hiS = std::max(hiS, ratio);
    }
    ++tested;
  }
  return {loG >= 20.0 && hiG <= 48.0 && loS >= 6.0 && hiS <= 10.0,
          fmt("gamma~ ratios [%.2f, %.2f], ", loG, hiG) + fmt("gamma* ratios [%.2f, %.2f]", loS, hiS)};
}

Verdict covariance_algebra() {
  testing::Rng rng(909);
  double det = 0.0, inv = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 6;
    const ProbabilityWeights w(testing::random_weights(rng, d));
    const Eigen::MatrixXd sigma = sigma_matrix<double>(w);
    det = std::max(det, rel(std::exp(log_det_sigma(w)), elimination_det(sigma)));
    const Eigen::MatrixXd id = sigma * sigma_inverse<double>(w);
    inv = std::max(inv, (id - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff());
  }
  return {det <= 1e-10 && inv <= 1e-10, fmt("det rel %.2e, inverse max entry %.2e", det, inv)};
}

Verdict monotonicity() {
  testing::Rng rng(1010);
  double worst = -1.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 4;
    const Eigen::VectorXd p = testing::random_weights(rng, d);
    std::uniform_int_distribution<Count> pickN(1, 30);
    const Count n = pickN(rng);
    std::uniform_int_distribution<Count> pickK(0, n / d + 1);
    std::vector<Count> k(d);
    for (auto& v : k) v = pickK(rng);
    std::uniform_int_distribution<int> pickI(0, d - 1);
    auto up = k;
    ++up[static_cast<std::size_t>(pickI(rng))];
    worst = std::max(worst, survival_exact(build_instance(n, p, up)) - survival_exact(build_instance(n, p, k)));
  }
  return {worst <= 1e-12, fmt("max increase %.2e over 200 pairs", worst)};
}

}  // namespace

int main() {
  criterion(1, "binomial reduction", 1.0, binomial_reduction);
  criterion(2, "d=2 panel", 60.0, d2_panel);
  criterion(3, "d=3 smoke", 120.0, d3_smoke);
  criterion(4, "Monte Carlo", 30.0, monte_carlo);
  criterion(5, "Stirling bounds", 0.0, stirling);
  criterion(6, "pointwise integrand identity", 0.0, pointwise_identity);
  criterion(7, "identity suite", 0.0, identity_suite);
  criterion(8, "remainder rates", 0.0, remainder_rates);
  criterion(9, "covariance algebra", 0.0, covariance_algebra);
  criterion(10, "monotonicity", 0.0, monotonicity);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
