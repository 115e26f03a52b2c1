#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "halftrack/errors.hpp"

namespace halftrack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Per-asset weight bounds: eta <= w_i <= delta for every held asset.
struct Bounds {
  double eta = 0.01;
  double delta = 0.5;

  void validate() const {
    if (!(eta >= 0.0 && eta <= delta && delta <= 1.0))
      throw ValidationError("bounds must satisfy 0 <= eta <= delta <= 1");
  }
};

enum class LambdaRule { recompute, monotone_min };
enum class InitKind { uniform, seeded_random };

struct TrackerConfig {
  int k = 5;
  Bounds bounds{};
  double epsilon = 0.01;         // mu0 = (1 - epsilon) / ||R||^2
  int max_iters = 10000;
  int support_stable_iters = 20;
  double rel_tol = 1e-8;
  LambdaRule rule = LambdaRule::recompute;
  InitKind init = InitKind::uniform;
  std::uint64_t seed = 42;
  bool refine = false;           // optional re-threshold pass after the QP

  void validate() const {
    bounds.validate();
    if (k < 1) throw InfeasibleConfig("k must be >= 1");
    if (k * bounds.eta > 1.0 + 1e-15 || k * bounds.delta < 1.0 - 1e-15)
      throw InfeasibleConfig("budget infeasible: need k*eta <= 1 <= k*delta");
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw InfeasibleConfig("epsilon must lie in (0,1)");
    if (max_iters < 1 || support_stable_iters < 1 || !(rel_tol > 0.0))
      throw InfeasibleConfig("iteration controls must be positive");
  }
};

// Weight vector with its support set Supp(w) = {i : w_i != 0}.
// Zeros are exact: they come out of the thresholding operator or are
// assigned by the QP stage, never compared against a tolerance.
struct PortfolioWeights {
  Vector weights;
  std::vector<Index> support;

  static PortfolioWeights from_weights(Vector w) {
    PortfolioWeights pw;
    pw.support.reserve(static_cast<std::size_t>(w.size()));
    for (Index i = 0; i < w.size(); ++i)
      if (w[i] != 0.0) pw.support.push_back(i);
    pw.weights = std::move(w);
    return pw;
  }
};

}  // namespace halftrack
