#include "halftrack/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "halftrack/log.hpp"

namespace halftrack {

void QpProblem::validate() const {
  bounds.validate();
  const Index kk = k();
  if (kk < 1) throw InfeasibleBounds("empty support");
  if (design.rows() != target.size()) throw DimensionMismatch("design/target rows");
  if (!design.allFinite() || !target.allFinite())
    throw ValidationError("non-finite QP data");
  if (kk * bounds.eta > budget + 1e-12 || kk * bounds.delta < budget - 1e-12)
    throw InfeasibleBounds("need k*eta <= budget <= k*delta");
}

namespace {

constexpr double kKktTol = 1e-10;
constexpr double kJitter = 1e-12;
constexpr double kActiveTol = 1e-9;

enum class VarState { free_var, at_lower, at_upper };

double stationarity_gap(const Vector& grad, const Vector& w, const Bounds& b) {
  const Index n = w.size();
  // The gap is piecewise linear in nu; its minimum is attained at one of
  // the candidate multipliers -g_i or a midpoint between two of them.
  std::vector<double> candidates;
  candidates.reserve(static_cast<std::size_t>(n * (n + 1) / 2 + n));
  for (Index i = 0; i < n; ++i) candidates.push_back(-grad[i]);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) candidates.push_back(-(grad[i] + grad[j]) / 2.0);

  double best = std::numeric_limits<double>::infinity();
  for (const double nu : candidates) {
    double gap = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double g = grad[i] + nu;
      const bool blocked_low = (w[i] <= b.eta + kActiveTol) && g >= 0.0;
      const bool blocked_high = (w[i] >= b.delta - kActiveTol) && g <= 0.0;
      if (!blocked_low && !blocked_high) gap = std::max(gap, std::abs(g));
    }
    best = std::min(best, gap);
  }
  return best;
}

}  // namespace

double kkt_residual(const QpProblem& p, const Vector& w) {
  const Vector grad = 2.0 * (p.design.transpose() * (p.design * w - p.target));
  double res = std::abs(w.sum() - p.budget);
  for (Index i = 0; i < w.size(); ++i) {
    res = std::max(res, p.bounds.eta - w[i]);
    res = std::max(res, w[i] - p.bounds.delta);
  }
  return std::max(res, stationarity_gap(grad, w, p.bounds));
}

QpSolution solve_qp(const QpProblem& p) {
  p.validate();
  const Index k = p.k();
  const double eta = p.bounds.eta;
  const double delta = p.bounds.delta;

  Matrix gram = p.design.transpose() * p.design;
  gram.diagonal().array() += kJitter;
  const Vector lin = p.design.transpose() * p.target;  // gradient = 2(Gw - lin)

  Vector w = Vector::Constant(k, p.budget / static_cast<double>(k));
  std::vector<VarState> state(static_cast<std::size_t>(k), VarState::free_var);

  const int max_iters = 50 * static_cast<int>(k);
  QpSolution sol;
  sol.converged = false;

  for (int iter = 0; iter < max_iters; ++iter) {
    sol.iterations = iter + 1;

    std::vector<Index> free_idx;
    double fixed_sum = 0.0;
    for (Index i = 0; i < k; ++i) {
      if (state[static_cast<std::size_t>(i)] == VarState::free_var)
        free_idx.push_back(i);
      else
        fixed_sum += w[i];
    }
    const Index nf = static_cast<Index>(free_idx.size());

    // Equality-constrained subproblem on the free block:
    //   [2*G_FF  e] [w_F]   [2*(lin_F - G_FX w_X)]
    //   [e^T     0] [nu ] = [budget - fixed_sum  ]
    Vector w_target = w;
    double nu = 0.0;
    if (nf > 0) {
      Matrix kkt = Matrix::Zero(nf + 1, nf + 1);
      Vector rhs(nf + 1);
      for (Index a = 0; a < nf; ++a) {
        const Index ia = free_idx[static_cast<std::size_t>(a)];
        for (Index c = 0; c < nf; ++c)
          kkt(a, c) = 2.0 * gram(ia, free_idx[static_cast<std::size_t>(c)]);
        kkt(a, nf) = 1.0;
        kkt(nf, a) = 1.0;
        double cross = 0.0;
        for (Index i = 0; i < k; ++i)
          if (state[static_cast<std::size_t>(i)] != VarState::free_var)
            cross += gram(ia, i) * w[i];
        rhs[a] = 2.0 * (lin[ia] - cross);
      }
      rhs[nf] = p.budget - fixed_sum;
      const Vector x = kkt.partialPivLu().solve(rhs);
      for (Index a = 0; a < nf; ++a) w_target[free_idx[static_cast<std::size_t>(a)]] = x[a];
      nu = x[nf];
    }

    // Ratio test along the segment from w to the subproblem solution.
    double alpha = 1.0;
    Index blocking = -1;
    VarState blocking_state = VarState::free_var;
    for (const Index i : free_idx) {
      const double d = w_target[i] - w[i];
      if (d < -1e-15 && w_target[i] < eta) {
        const double a = (eta - w[i]) / d;
        if (a < alpha) { alpha = a; blocking = i; blocking_state = VarState::at_lower; }
      } else if (d > 1e-15 && w_target[i] > delta) {
        const double a = (delta - w[i]) / d;
        if (a < alpha) { alpha = a; blocking = i; blocking_state = VarState::at_upper; }
      }
    }

    for (const Index i : free_idx) w[i] += alpha * (w_target[i] - w[i]);

    if (blocking >= 0) {
      w[blocking] = (blocking_state == VarState::at_lower) ? eta : delta;
      state[static_cast<std::size_t>(blocking)] = blocking_state;
      continue;
    }

    // Full step taken: check multipliers of the active bounds.
    const Vector grad = 2.0 * (gram * w - lin);
    if (nf == 0) {
      // no free variables; pick the multiplier that best centers the gaps
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < k; ++i) {
        if (state[static_cast<std::size_t>(i)] == VarState::at_lower)
          lo = std::max(lo, -grad[i]);
        else
          hi = std::min(hi, -grad[i]);
      }
      nu = std::isfinite(lo) ? (std::isfinite(hi) ? 0.5 * (std::min(lo, hi) + std::max(lo, hi)) : lo)
                             : hi;
      if (!std::isfinite(nu)) nu = 0.0;
    }

    double worst = 0.0;
    Index worst_idx = -1;
    for (Index i = 0; i < k; ++i) {
      const auto st = state[static_cast<std::size_t>(i)];
      if (st == VarState::free_var) continue;
      const double mult = (st == VarState::at_lower) ? grad[i] + nu : -(grad[i] + nu);
      if (mult < worst) { worst = mult; worst_idx = i; }
    }
    if (worst_idx >= 0 && worst < -kKktTol) {
      state[static_cast<std::size_t>(worst_idx)] = VarState::free_var;
      continue;
    }

    sol.converged = true;
    break;
  }

  if (!sol.converged)
    log::warn("solve_qp hit iteration cap (", max_iters, "), returning best iterate");

  // Snap near-bound values so downstream support logic sees exact bounds.
  for (Index i = 0; i < k; ++i) {
    if (std::abs(w[i] - eta) <= kActiveTol) w[i] = eta;
    if (std::abs(w[i] - delta) <= kActiveTol) w[i] = delta;
    if (state[static_cast<std::size_t>(i)] == VarState::at_lower) sol.active_lower.push_back(i);
    if (state[static_cast<std::size_t>(i)] == VarState::at_upper) sol.active_upper.push_back(i);
  }

  sol.weights = w;
  sol.objective = (p.design * w - p.target).squaredNorm();
  sol.kkt_residual = kkt_residual(p, w);
  return sol;
}

}  // namespace halftrack
