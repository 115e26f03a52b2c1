#include "halftrack/lars.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "halftrack/log.hpp"

namespace halftrack {

namespace {

constexpr double kLambdaTol = 1e-12;

Vector full_coefficients(Index n, const std::vector<Index>& active, const Vector& w_active) {
  Vector w = Vector::Zero(n);
  for (std::size_t a = 0; a < active.size(); ++a)
    w[active[a]] = w_active[static_cast<Index>(a)];
  return w;
}

}  // namespace

LarsState lars_path(const Matrix& returns, const Vector& target, Index k) {
  const Index n = returns.cols();
  if (k < 1 || k >= n) throw KOutOfRange("lars: need 1 <= k < N");
  if (returns.rows() != target.size()) throw DimensionMismatch("lars: shape mismatch");

  LarsState st;
  const Vector c0 = returns.transpose() * target;

  // First entry: the variable with the largest absolute correlation.
  Index first = 0;
  for (Index j = 1; j < n; ++j)
    if (std::abs(c0[j]) > std::abs(c0[first])) first = j;

  std::vector<Index> active{first};
  std::vector<int> signs{c0[first] >= 0.0 ? 1 : -1};
  double lambda = 2.0 * std::abs(c0[first]);

  auto record = [&](double lam, const Vector& w_active) {
    LarsBreakpoint bp;
    bp.lambda = lam;
    bp.active_set = active;
    bp.signs = signs;
    bp.coefficients = full_coefficients(n, active, w_active);
    st.breakpoints.push_back(std::move(bp));
    st.step_count = static_cast<int>(st.breakpoints.size());
    st.lambda_current = lam;
    st.active_set = active;
    st.coefficients = st.breakpoints.back().coefficients;
  };

  record(lambda, Vector::Zero(1));
  if (static_cast<Index>(active.size()) == k) return st;

  const int max_steps = 8 * static_cast<int>(n) + 16;
  for (int step = 0; step < max_steps; ++step) {
    const Index m = static_cast<Index>(active.size());
    Matrix ra(returns.rows(), m);
    Vector sgn(m);
    for (Index a = 0; a < m; ++a) {
      ra.col(a) = returns.col(active[static_cast<std::size_t>(a)]);
      sgn[a] = signs[static_cast<std::size_t>(a)];
    }
    Matrix gram = ra.transpose() * ra;
    gram.diagonal().array() += 1e-14;
    const auto solver = gram.ldlt();
    const Vector w_ls = solver.solve(ra.transpose() * target);  // lambda -> 0 limit
    const Vector dir = solver.solve(sgn);
    // Active coefficients along the path: w_A(lam) = w_ls - (lam/2) dir.

    double best_lambda = -1.0;
    Index best_var = -1;
    bool best_is_drop = false;
    int best_sign = 0;

    // Entry events: an inactive variable reaches 2|c_j(lam)| = lam.
    const Vector res_ls = target - ra * w_ls;
    const Vector shift = ra * dir;
    for (Index j = 0; j < n; ++j) {
      if (std::find(active.begin(), active.end(), j) != active.end()) continue;
      const double a_j = returns.col(j).dot(res_ls);
      const double b_j = returns.col(j).dot(shift);
      for (const int sign : {+1, -1}) {
        const double denom = 1.0 - sign * b_j;
        if (std::abs(denom) < 1e-14) continue;
        const double lam = sign * 2.0 * a_j / denom;
        if (lam > kLambdaTol && lam < lambda - kLambdaTol && lam > best_lambda) {
          best_lambda = lam;
          best_var = j;
          best_is_drop = false;
          best_sign = sign;
        }
      }
    }

    // Drop events: an active coefficient crosses zero.
    for (Index a = 0; a < m; ++a) {
      if (std::abs(dir[a]) < 1e-14) continue;
      const double lam = 2.0 * w_ls[a] / dir[a];
      if (lam > kLambdaTol && lam < lambda - kLambdaTol && lam >= best_lambda) {
        best_lambda = lam;
        best_var = active[static_cast<std::size_t>(a)];
        best_is_drop = true;
      }
    }

    if (best_var < 0) {
      // Path ends at lambda = 0 with the least-squares fit on the actives.
      record(0.0, w_ls);
      st.path_exhausted = static_cast<Index>(active.size()) < k;
      if (st.path_exhausted)
        log::warn("lars path exhausted with ", active.size(), " < ", k, " active variables");
      return st;
    }

    lambda = best_lambda;
    Vector w_at = w_ls - (lambda / 2.0) * dir;

    if (best_is_drop) {
      const auto pos = std::find(active.begin(), active.end(), best_var) - active.begin();
      w_at[static_cast<Index>(pos)] = 0.0;
      Vector w_next(m - 1);
      for (Index a = 0, c = 0; a < m; ++a)
        if (a != static_cast<Index>(pos)) w_next[c++] = w_at[a];
      active.erase(active.begin() + pos);
      signs.erase(signs.begin() + pos);
      record(lambda, w_next);
    } else {
      active.push_back(best_var);
      signs.push_back(best_sign);
      Vector w_next(m + 1);
      w_next.head(m) = w_at;
      w_next[m] = 0.0;  // entrant starts at zero
      record(lambda, w_next);
    }

    if (static_cast<Index>(active.size()) == k) return st;
  }

  st.path_exhausted = true;
  log::warn("lars step cap reached before k actives");
  return st;
}

std::vector<Index> lars_support(const Matrix& returns, const Vector& target, Index k) {
  LarsState st = lars_path(returns, target, k);
  std::vector<Index> support = st.active_set;
  std::sort(support.begin(), support.end());
  return support;
}

Vector cd_lasso(const Matrix& returns, const Vector& target, double lambda) {
  if (lambda < 0.0) throw NegativeParameter("cd_lasso: lambda must be >= 0");
  const Index n = returns.cols();
  Vector w = Vector::Zero(n);
  Vector residual = target;
  Vector col_sq(n);
  for (Index i = 0; i < n; ++i) col_sq[i] = returns.col(i).squaredNorm();

  constexpr int kMaxSweeps = 100000;
  constexpr double kTol = 1e-10;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double max_change = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (col_sq[i] == 0.0) continue;
      const double rho = returns.col(i).dot(residual) + col_sq[i] * w[i];
      double next = 0.0;
      if (rho > lambda / 2.0)
        next = (rho - lambda / 2.0) / col_sq[i];
      else if (rho < -lambda / 2.0)
        next = (rho + lambda / 2.0) / col_sq[i];
      const double change = next - w[i];
      if (change != 0.0) {
        residual -= change * returns.col(i);
        w[i] = next;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if (max_change < kTol) break;
  }
  return w;
}

}  // namespace halftrack
