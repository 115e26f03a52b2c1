#pragma once

#include <vector>

#include "halftrack/types.hpp"

namespace halftrack {

// Regularization weight / step size pair with the derived jump threshold
// (54^{1/3}/4) * (lambda*mu)^{2/3} of the half-thresholding operator.
struct ThresholdParams {
  double lambda = 0.0;
  double mu = 0.0;
  double threshold = 0.0;

  static ThresholdParams make(double lambda, double mu);
};

double half_threshold_gap(double lambda_mu);

// Scalar half-thresholding operator: 0 at or below the threshold,
// otherwise (2/3) x (1 + cos(2*pi/3 - 2*phi/3)) with
// cos(phi) = (lambda_mu/8) (|x|/3)^{-3/2}. Odd in x.
double half_threshold_scalar(double x, double lambda_mu);

// Componentwise application; zeros are exact.
Vector half_threshold_vector(const Vector& x, double lambda_mu);

// Gradient-descent map B_mu(w) = w + mu * R^T (r_index - R w).
Vector gradient_step(const Vector& w, const Matrix& returns,
                     const Vector& index_returns, double mu);

// Magnitude of the rank-th largest entry of b (rank is 1-based; ties
// broken by lower index ranked first).
double kth_largest_magnitude(const Vector& b, Index rank);

// K-sparsity parameter rule: lambda = (sqrt(96)/(9*mu)) |b_(k+1)|^{3/2};
// the monotone-min variant damps it by min with the previous lambda.
// The constants collapse so the induced threshold equals |b_(k+1)|.
double adaptive_lambda(const Vector& b, Index k, double mu,
                       double lambda_prev, LambdaRule rule);

enum class StopReason { support_stable, max_iters, stalled };

struct IterationTrace {
  int iterations = 0;
  std::vector<double> lambda_history;
  std::vector<std::vector<Index>> support_history_tail;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iters;
};

struct SupportResult {
  PortfolioWeights weights;  // raw pre-QP iterate, trimmed to K entries
  IterationTrace trace;
};

// Stage 1 of the hybrid algorithm: iterate gradient step + adaptive
// lambda + half thresholding on the training block until the support is
// stable. The budget constraint is ignored here; the QP stage restores it.
SupportResult select_support(const Matrix& train_returns,
                             const Vector& train_index,
                             const TrackerConfig& cfg);

SupportResult select_support(const Matrix& train_returns,
                             const Vector& train_index,
                             const TrackerConfig& cfg, const Vector& w0);

}  // namespace halftrack
