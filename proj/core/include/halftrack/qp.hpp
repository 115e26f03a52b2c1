#pragma once

#include <vector>

#include "halftrack/types.hpp"

namespace halftrack {

// Restricted least-squares problem on a fixed support:
//   min ||design * w - target||^2   s.t.  e^T w = 1,  eta <= w_i <= delta.
struct QpProblem {
  Matrix design;   // T x K, columns = returns of the supported stocks
  Vector target;   // length T
  Bounds bounds{};
  double budget = 1.0;

  Index k() const { return design.cols(); }
  void validate() const;
};

struct QpSolution {
  Vector weights;
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::vector<Index> active_lower;
  std::vector<Index> active_upper;
  bool converged = true;   // false: iteration cap hit, best iterate returned
  int iterations = 0;
};

// Primal active-set method starting from the feasible uniform point
// w = e/K. Equality-constrained subproblems on the free variables, ratio
// test to add bounds, most-negative-multiplier rule to drop them.
// Terminates when the KKT residual is below 1e-10 or after 50*K passes.
QpSolution solve_qp(const QpProblem& p);

// Optimality certificate: max of the budget residual, bound violations,
// and the stationarity gap min_nu ||P(grad f(w) + nu e)||_inf, where P
// zeroes components blocked by an active bound with a correctly signed
// multiplier.
double kkt_residual(const QpProblem& p, const Vector& w);

}  // namespace halftrack
