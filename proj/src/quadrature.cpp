#include "mnsurv/quadrature.hpp"

#include "mnsurv/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mnsurv {

void QuadratureSpec::validate() const {
  if (mode == Mode::deterministic) {
    if (nodesPerAxis < 2 || nodesPerAxis > kMaxNodes) {
      throw ValidationError("nodes per axis must lie in [2, 128], got " +
                            std::to_string(nodesPerAxis));
    }
  } else if (replications < kMinReplications) {
    throw ValidationError("Monte Carlo needs at least 1000 replications");
  }
}

GaussLegendreRule legendre_rule(int nodes) {
  if (nodes < 2 || nodes > kMaxNodes) {
    throw ValidationError("Gauss-Legendre order must lie in [2, 128]");
  }
  const int G = nodes;
  GaussLegendreRule rule;
  rule.nodes.resize(G);
  rule.weights.resize(G);
  // Roots of P_G on [-1, 1] are symmetric; solve for the positive half.
  for (int i = 0; i < (G + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (G + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= G; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = G * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    // Recompute P'_G at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= G; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    derivative = G * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    // Map [-1, 1] -> [0, 1]; x is the positive root, ascending order below.
    rule.nodes[G - 1 - i] = 0.5 * (1.0 + x);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[G - 1 - i] = 0.5 * w;
    rule.weights[i] = 0.5 * w;
  }
  return rule;
}

namespace {

struct IteratedSum {
  const ProbabilityWeights& weights;
  const LogIntegrand& logf;
  const GaussLegendreRule& rule;
  double shift;
  double maxLog = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd s;

  double axis(int i, double fixedSum) {
    const int d = weights.dim();
    const double upper = weights.prefix()[i] - fixedSum;
    double total = 0.0;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      s[i] = upper * rule.nodes[g];
      double inner;
      if (i + 1 < d) {
        inner = axis(i + 1, fixedSum + s[i]);
      } else {
        const double lv = logf(s);
        if (!std::isfinite(lv)) {
          std::ostringstream msg;
          msg << "integrand is not finite (" << lv << ") at node (";
          for (Eigen::Index m = 0; m < s.size(); ++m) msg << (m ? ", " : "") << s[m];
          msg << ")";
          throw std::domain_error(msg.str());
        }
        if (lv > maxLog) maxLog = lv;
        inner = std::exp(lv - shift);
      }
      total += rule.weights[g] * inner;
    }
    return upper * total;
  }
};

void check_cost(const ProbabilityWeights& weights, const QuadratureSpec& spec) {
  spec.validate();
  if (spec.mode != QuadratureSpec::Mode::deterministic) {
    throw ValidationError("integrate_region needs a deterministic quadrature spec");
  }
  if (std::pow(static_cast<double>(spec.nodesPerAxis), weights.dim()) >
      kMaxQuadratureEvaluations) {
    throw CostGuardError("quadrature would need more than 1e8 integrand evaluations");
  }
}

RegionIntegral run(const ProbabilityWeights& weights, const LogIntegrand& logf,
                   const GaussLegendreRule& rule, double shift, double* maxLog) {
  IteratedSum pass{weights, logf, rule, shift, -std::numeric_limits<double>::infinity(),
                   Eigen::VectorXd::Zero(weights.dim())};
  const double sum = pass.axis(0, 0.0);
  if (maxLog) *maxLog = pass.maxLog;
  return {sum * std::exp(shift), std::log(sum) + shift};
}

}  // namespace

RegionIntegral integrate_region(const ProbabilityWeights& weights, const LogIntegrand& logf,
                                const QuadratureSpec& spec, double shift) {
  check_cost(weights, spec);
  if (!std::isfinite(shift)) throw ValidationError("shift must be finite");
  return run(weights, logf, legendre_rule(spec.nodesPerAxis), shift, nullptr);
}

RegionIntegral integrate_region(const ProbabilityWeights& weights, const LogIntegrand& logf,
                                const QuadratureSpec& spec) {
  check_cost(weights, spec);
  const GaussLegendreRule rule = legendre_rule(spec.nodesPerAxis);
  double shift = logf(weights.p());
  if (!std::isfinite(shift)) shift = 0.0;
  double maxLog = 0.0;
  RegionIntegral out = run(weights, logf, rule, shift, &maxLog);
  // exp(logf - shift) can overflow or vanish when the integrand peaks far
  // from p; rerun around the peak.
  const bool unusable = !std::isfinite(out.logValue) || !(out.value > 0.0);
  if (unusable || maxLog - shift > 600.0) {
    out = run(weights, logf, rule, maxLog, nullptr);
  }
  return out;
}

MonteCarloEstimate integrate_region_mc(const ProbabilityWeights& weights,
                                       const LogIntegrand& logf, const QuadratureSpec& spec) {
  spec.validate();
  if (spec.mode != QuadratureSpec::Mode::monte_carlo) {
    throw ValidationError("integrate_region_mc needs a Monte Carlo spec");
  }
  const int d = weights.dim();
  UniformStream uniforms(spec.seed);
  Eigen::VectorXd s(d);
  double mean = 0.0;
  double m2 = 0.0;
  for (Count r = 0; r < spec.replications; ++r) {
    double fixed = 0.0;
    double jacobian = 1.0;
    for (int i = 0; i < d; ++i) {
      const double upper = weights.prefix()[i] - fixed;
      s[i] = upper * uniforms.next();
      fixed += s[i];
      jacobian *= upper;
    }
    const double value = std::exp(logf(s)) * jacobian;
    // Welford update
    const double delta = value - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (value - mean);
  }
  const double n = static_cast<double>(spec.replications);
  const double variance = m2 / (n - 1.0);
  return {mean, std::sqrt(variance / n), spec.replications, spec.seed};
}

}  // namespace mnsurv
