#pragma once

#include "mnsurv/model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace mnsurv {

inline constexpr int kDefaultNodes = 48;
inline constexpr int kMaxNodes = 128;
inline constexpr double kMaxQuadratureEvaluations = 1e8;
inline constexpr Count kMinReplications = 1000;

struct QuadratureSpec {
  enum class Mode { deterministic, monte_carlo };

  Mode mode = Mode::deterministic;
  int nodesPerAxis = kDefaultNodes;
  Count replications = 0;
  std::uint64_t seed = 0;

  static QuadratureSpec gauss_legendre(int nodes) {
    return {Mode::deterministic, nodes, 0, 0};
  }
  static QuadratureSpec monte_carlo(Count replications, std::uint64_t seed) {
    return {Mode::monte_carlo, kDefaultNodes, replications, seed};
  }

  /// Throws ValidationError for G outside [2, 128] or fewer than 1000 replications.
  void validate() const;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // strictly inside (0, 1), ascending
  std::vector<double> weights;  // positive, sum to 1
};

/// G-point Gauss-Legendre rule on [0, 1], exact for polynomials of degree
/// 2G - 1. Nodes come from Newton iteration on P_G.
GaussLegendreRule legendre_rule(int nodes);

using LogIntegrand = std::function<double(const Eigen::VectorXd&)>;

struct RegionIntegral {
  double value;
  double logValue;
};

/// Iterated Gauss-Legendre integral of exp(logf) over R_d, axis i running over
/// [0, nested_upper_limit(i, s_<i)]. Terms are formed as exp(logf(s) - shift)
/// with shift = logf(p); if that overflows or underflows, the pass is repeated
/// with the largest node value as shift. Throws std::domain_error when logf is
/// not finite at a node and CostGuardError when G^d exceeds 1e8.
RegionIntegral integrate_region(const ProbabilityWeights& weights, const LogIntegrand& logf,
                                const QuadratureSpec& spec);

/// Same with a caller-chosen shift and no fallback.
RegionIntegral integrate_region(const ProbabilityWeights& weights, const LogIntegrand& logf,
                                const QuadratureSpec& spec, double shift);

struct MonteCarloEstimate {
  double estimate;
  double standardError;
  Count replications;
  std::uint64_t seed;
};

/// Uniform double in the open interval (0, 1) from 53 random bits of a 64-bit
/// Mersenne twister. Fixed bit-level algorithm, so results do not depend on
/// the standard library's distribution implementations.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

/// Monte Carlo integral over R_d: s_i ~ Uniform[0, U_i(s_<i)] sequentially,
/// weighted by the exact sampling Jacobian prod_i U_i.
MonteCarloEstimate integrate_region_mc(const ProbabilityWeights& weights,
                                       const LogIntegrand& logf, const QuadratureSpec& spec);

}  // namespace mnsurv
