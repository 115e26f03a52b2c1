#include "halftrack/half_threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "halftrack/log.hpp"
#include "halftrack/tracking.hpp"

namespace halftrack {

namespace {
const double kGapCoeff = std::cbrt(54.0) / 4.0;
const double kLambdaCoeff = std::sqrt(96.0) / 9.0;
}  // namespace

double half_threshold_gap(double lambda_mu) {
  if (lambda_mu < 0.0) throw NegativeParameter("lambda*mu must be >= 0");
  return kGapCoeff * std::pow(lambda_mu, 2.0 / 3.0);
}

ThresholdParams ThresholdParams::make(double lambda, double mu) {
  if (lambda < 0.0) throw NegativeParameter("lambda must be >= 0");
  if (mu <= 0.0) throw NegativeParameter("mu must be > 0");
  return ThresholdParams{lambda, mu, half_threshold_gap(lambda * mu)};
}

double half_threshold_scalar(double x, double lambda_mu) {
  const double gap = half_threshold_gap(lambda_mu);
  const double ax = std::abs(x);
  // The pow chain computing the gap can land a few ulps below the exact
  // threshold; without slack, an input meant to sit exactly on it survives.
  if (ax <= gap * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return 0.0;
  // cos(phi) = (lambda_mu / 8) (|x|/3)^{-3/2}; at the threshold this is
  // sqrt(2)/2 and it decreases with |x|, so acos stays well defined.
  const double c = std::clamp(lambda_mu / 8.0 * std::pow(ax / 3.0, -1.5), -1.0, 1.0);
  const double phi = std::acos(c);
  return (2.0 / 3.0) * x *
         (1.0 + std::cos(2.0 * std::numbers::pi / 3.0 - 2.0 * phi / 3.0));
}

Vector half_threshold_vector(const Vector& x, double lambda_mu) {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = half_threshold_scalar(x[i], lambda_mu);
  return out;
}

Vector gradient_step(const Vector& w, const Matrix& returns,
                     const Vector& index_returns, double mu) {
  if (returns.rows() != index_returns.size() || returns.cols() != w.size())
    throw DimensionMismatch("gradient_step: shape mismatch");
  return w + mu * (returns.transpose() * (index_returns - returns * w));
}

double kth_largest_magnitude(const Vector& b, Index rank) {
  if (rank < 1 || rank > b.size()) throw KOutOfRange("rank out of range");
  std::vector<Index> order(static_cast<std::size_t>(b.size()));
  for (Index i = 0; i < b.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::nth_element(order.begin(), order.begin() + (rank - 1), order.end(),
                   [&](Index a, Index c) {
                     const double ma = std::abs(b[a]);
                     const double mc = std::abs(b[c]);
                     if (ma != mc) return ma > mc;
                     return a < c;
                   });
  return std::abs(b[order[static_cast<std::size_t>(rank - 1)]]);
}

double adaptive_lambda(const Vector& b, Index k, double mu,
                       double lambda_prev, LambdaRule rule) {
  if (k < 1 || k >= b.size()) throw KOutOfRange("k must satisfy 1 <= k < N");
  if (!b.allFinite()) throw ValidationError("adaptive_lambda: non-finite input");
  const double mag = kth_largest_magnitude(b, k + 1);
  const double value = kLambdaCoeff / mu * std::pow(mag, 1.5);
  if (rule == LambdaRule::monotone_min) return std::min(lambda_prev, value);
  return value;
}

namespace {

std::vector<Index> support_of(const Vector& w) {
  std::vector<Index> s;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) s.push_back(i);
  return s;
}

// Keep the k largest-magnitude entries (ties to the lower index).
Vector trim_to_k(const Vector& w, Index k) {
  std::vector<Index> order;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) order.push_back(i);
  if (static_cast<Index>(order.size()) <= k) return w;
  std::sort(order.begin(), order.end(), [&](Index a, Index c) {
    const double ma = std::abs(w[a]);
    const double mc = std::abs(w[c]);
    if (ma != mc) return ma > mc;
    return a < c;
  });
  Vector out = Vector::Zero(w.size());
  for (Index r = 0; r < k; ++r) out[order[static_cast<std::size_t>(r)]] = w[order[static_cast<std::size_t>(r)]];
  return out;
}

Vector initial_point(const TrackerConfig& cfg, Index n) {
  if (cfg.init == InitKind::uniform)
    return Vector::Constant(n, 1.0 / static_cast<double>(n));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w[i] = unif(rng);
  const double s = w.sum();
  if (s > 0.0) w /= s;
  return w;
}

}  // namespace

SupportResult select_support(const Matrix& train_returns,
                             const Vector& train_index,
                             const TrackerConfig& cfg) {
  return select_support(train_returns, train_index, cfg,
                        initial_point(cfg, train_returns.cols()));
}

SupportResult select_support(const Matrix& train_returns,
                             const Vector& train_index,
                             const TrackerConfig& cfg, const Vector& w0) {
  cfg.validate();
  const Index n = train_returns.cols();
  if (cfg.k >= n) throw InfeasibleConfig("k must be < number of stocks");
  if (w0.size() != n) throw DimensionMismatch("select_support: bad initial point");

  const double mu = (1.0 - cfg.epsilon) / spectral_norm_sq(train_returns);

  SupportResult result;
  IterationTrace& trace = result.trace;
  trace.lambda_history.reserve(static_cast<std::size_t>(cfg.max_iters));

  Vector w = w0;
  std::vector<Index> support = support_of(w);
  double lambda = std::numeric_limits<double>::infinity();
  int stable_count = 0;
  int stalled_count = 0;
  constexpr std::size_t kTailLen = 5;

  for (int it = 0; it < cfg.max_iters; ++it) {
    const Vector b = gradient_step(w, train_returns, train_index, mu);
    lambda = adaptive_lambda(b, cfg.k, mu, lambda, cfg.rule);
    Vector w_next = half_threshold_vector(b, lambda * mu);

    trace.lambda_history.push_back(lambda);
    trace.iterations = it + 1;

    const double rel_change =
        (w_next - w).norm() / std::max(w.norm(), std::numeric_limits<double>::min());
    std::vector<Index> next_support = support_of(w_next);
    const bool same_support = next_support == support;

    trace.support_history_tail.push_back(next_support);
    if (trace.support_history_tail.size() > kTailLen)
      trace.support_history_tail.erase(trace.support_history_tail.begin());

    w = std::move(w_next);
    support = std::move(next_support);

    stable_count = same_support ? stable_count + 1 : 0;
    stalled_count = (rel_change < cfg.rel_tol) ? stalled_count + 1 : 0;

    if (stable_count >= cfg.support_stable_iters && rel_change < cfg.rel_tol) {
      trace.converged = true;
      trace.stop_reason = StopReason::support_stable;
      break;
    }
    // weights frozen but support keeps flipping (threshold ties)
    if (stalled_count >= cfg.support_stable_iters &&
        stable_count < cfg.support_stable_iters) {
      trace.stop_reason = StopReason::stalled;
      break;
    }
  }
  if (!trace.converged && trace.stop_reason != StopReason::stalled)
    trace.stop_reason = StopReason::max_iters;
  if (!trace.converged)
    log::info("select_support did not stabilize after ", trace.iterations, " iterations");

  result.weights = PortfolioWeights::from_weights(trim_to_k(w, cfg.k));
  return result;
}

}  // namespace halftrack
