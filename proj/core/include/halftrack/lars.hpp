#pragma once

#include <vector>

#include "halftrack/types.hpp"

namespace halftrack {

// One breakpoint of the LARS/Lasso path for
//   min ||R w - y||^2 + lambda ||w||_1
// (no 1/2 and no 1/T; a variable enters when 2|correlation| = lambda).
struct LarsBreakpoint {
  double lambda = 0.0;
  std::vector<Index> active_set;   // in entry order
  std::vector<int> signs;          // parallel to active_set
  Vector coefficients;             // full length-N vector at this breakpoint
};

struct LarsState {
  std::vector<LarsBreakpoint> breakpoints;
  std::vector<Index> active_set;   // at the stopping breakpoint
  Vector coefficients;
  double lambda_current = 0.0;
  int step_count = 0;
  bool path_exhausted = false;     // path ended before reaching k actives
};

// Runs LARS with the Lasso modification (zero-crossing variables are
// dropped) and stops at the first breakpoint where the active set has
// size k. On PathExhausted the state carries what the path reached.
LarsState lars_path(const Matrix& returns, const Vector& target, Index k);

// Active set at the stopping breakpoint, sorted ascending.
std::vector<Index> lars_support(const Matrix& returns, const Vector& target, Index k);

// Cyclic coordinate descent on ||R w - y||^2 + lambda ||w||_1, used as an
// independent oracle for the path. Stops when the largest coordinate
// change in a sweep is below 1e-10 (at most 100000 sweeps).
Vector cd_lasso(const Matrix& returns, const Vector& target, double lambda);

}  // namespace halftrack
