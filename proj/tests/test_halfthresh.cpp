#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "halftrack/half_threshold.hpp"
#include "halftrack/orlib.hpp"
#include "halftrack/tracking.hpp"

using namespace halftrack;

namespace {

// Independent scalar proximal oracle: grid search over [0, |x|] for the
// minimizer of g(u) = (u - x)^2 + lambda_mu * sqrt(|u|), with local
// golden-section refinement. Always returns the sign-matched candidate
// or 0, whichever is lower.
double prox_oracle(double x, double lambda_mu) {
  const double ax = std::abs(x);
  auto g = [&](double u) { return (u - ax) * (u - ax) + lambda_mu * std::sqrt(u); };

  const int steps = 200000;
  double best_u = 0.0;
  double best_g = g(0.0);
  for (int i = 1; i <= steps; ++i) {
    const double u = ax * static_cast<double>(i) / steps;
    const double v = g(u);
    if (v < best_g) {
      best_g = v;
      best_u = u;
    }
  }
  // golden-section refine around the grid winner
  double lo = std::max(0.0, best_u - ax / steps);
  double hi = std::min(ax, best_u + ax / steps);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  while (hi - lo > 1e-12) {
    const double a = hi - gr * (hi - lo);
    const double b = lo + gr * (hi - lo);
    if (g(a) < g(b))
      hi = b;
    else
      lo = a;
  }
  const double u = 0.5 * (lo + hi);
  if (g(u) > g(0.0)) return 0.0;
  return x >= 0.0 ? u : -u;
}

}  // namespace

TEST_CASE("scalar operator below-threshold branch") {
  // threshold at lambda_mu = 1 is 54^{1/3}/4, just above 0.9
  CHECK(half_threshold_gap(1.0) == doctest::Approx(std::cbrt(54.0) / 4.0));
  CHECK(half_threshold_scalar(0.9, 1.0) == 0.0);
  CHECK(half_threshold_scalar(-0.9, 1.0) == 0.0);
  CHECK(half_threshold_scalar(0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(half_threshold_scalar(1.0, -0.5), NegativeParameter);
}

TEST_CASE("scalar operator is odd") {
  for (const double x : {0.5, 1.0, 1.5, 2.0, 5.0, 17.3}) {
    for (const double lm : {0.1, 1.0, 2.5}) {
      CHECK(half_threshold_scalar(-x, lm) == -half_threshold_scalar(x, lm));
      CHECK(std::abs(half_threshold_scalar(x, lm)) <= x);
    }
  }
}

TEST_CASE("scalar operator matches the proximal grid oracle") {
  // the documented spot value: x = 2, lambda_mu = 1 minimizes
  // (u - 2)^2 + sqrt(|u|) near 1.814
  const double h = half_threshold_scalar(2.0, 1.0);
  CHECK(h == doctest::Approx(prox_oracle(2.0, 1.0)).epsilon(1e-6));
  CHECK(h == doctest::Approx(1.814).epsilon(1e-3));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double lm = std::pow(10.0, -2.0 + 3.0 * unif(rng));
    const double gap = half_threshold_gap(lm);
    const double x = (1.5 + 4.0 * unif(rng)) * gap * (trial % 2 == 0 ? 1.0 : -1.0);
    CHECK(half_threshold_scalar(x, lm) ==
          doctest::Approx(prox_oracle(x, lm)).epsilon(1e-6));
  }
}

TEST_CASE("nonzero branch satisfies the stationarity condition") {
  // 2(u - x) + (lambda_mu / 2) sgn(u) |u|^{-1/2} = 0 at u = h(x)
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double lm = std::pow(10.0, -3.0 + 4.0 * unif(rng));
    const double x = (1.5 + 8.0 * unif(rng)) * half_threshold_gap(lm);
    const double u = half_threshold_scalar(x, lm);
    REQUIRE(u != 0.0);
    const double res = 2.0 * (u - x) + lm / 2.0 / std::sqrt(u);
    CHECK(std::abs(res) < 1e-6);
  }
}

TEST_CASE("vector operator") {
  CHECK(half_threshold_vector(Vector::Zero(4), 1.0) == Vector::Zero(4));

  Vector small(3);
  small << 0.1, -0.2, 0.5;  // all below the lambda_mu = 1 threshold
  CHECK(half_threshold_vector(small, 1.0) == Vector::Zero(3));

  Vector mixed(5);
  mixed << 0.3, -2.0, 1.5, 0.0, 4.0;
  const Vector out = half_threshold_vector(mixed, 1.0);
  for (Index i = 0; i < 5; ++i)
    CHECK(out[i] == half_threshold_scalar(mixed[i], 1.0));
}

TEST_CASE("gradient_step") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix r(5, 3);
  Vector w(3);
  for (Index t = 0; t < 5; ++t)
    for (Index i = 0; i < 3; ++i) r(t, i) = gauss(rng);
  for (Index i = 0; i < 3; ++i) w[i] = gauss(rng);

  // zero residual fixed point
  const Vector idx = r * w;
  CHECK((gradient_step(w, r, idx, 0.3) - w).norm() == 0.0);

  // mu = 0 leaves w unchanged
  Vector other = Vector::Random(5);
  CHECK(gradient_step(w, r, other, 0.0) == w);

  // scalar-loop oracle
  const double mu = 0.17;
  const Vector got = gradient_step(w, r, other, mu);
  for (Index i = 0; i < 3; ++i) {
    double grad = 0.0;
    for (Index t = 0; t < 5; ++t) {
      double row = 0.0;
      for (Index j = 0; j < 3; ++j) row += r(t, j) * w[j];
      grad += r(t, i) * (other[t] - row);
    }
    CHECK(got[i] == doctest::Approx(w[i] + mu * grad).epsilon(1e-14));
  }

  CHECK_THROWS_AS(gradient_step(Vector::Random(2), r, other, 0.1), DimensionMismatch);
}

TEST_CASE("adaptive_lambda") {
  Vector b(4);
  b << 4.0, 3.0, 2.0, 1.0;

  SUBCASE("recompute value and threshold identity") {
    const double lam = adaptive_lambda(b, 2, 1.0, 0.0, LambdaRule::recompute);
    CHECK(lam == doctest::Approx(std::sqrt(96.0) / 9.0 * std::pow(2.0, 1.5)).epsilon(1e-15));
    // the constants collapse: induced threshold equals |b_(k+1)| exactly
    CHECK(half_threshold_gap(lam * 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("zero (k+1)-th magnitude gives lambda 0") {
    Vector sparse(4);
    sparse << 5.0, -3.0, 0.0, 0.0;
    CHECK(adaptive_lambda(sparse, 2, 0.7, 99.0, LambdaRule::recompute) == 0.0);
  }

  SUBCASE("monotone-min caps at the previous lambda") {
    CHECK(adaptive_lambda(b, 2, 1.0, 0.0, LambdaRule::monotone_min) == 0.0);
    const double fresh = adaptive_lambda(b, 2, 1.0,
                                         std::numeric_limits<double>::infinity(),
                                         LambdaRule::monotone_min);
    CHECK(fresh == adaptive_lambda(b, 2, 1.0, 0.0, LambdaRule::recompute));
  }

  SUBCASE("k range") {
    CHECK_THROWS_AS(adaptive_lambda(b, 0, 1.0, 0.0, LambdaRule::recompute), KOutOfRange);
    CHECK_THROWS_AS(adaptive_lambda(b, 4, 1.0, 0.0, LambdaRule::recompute), KOutOfRange);
  }
}

TEST_CASE("thresholding keeps exactly the K largest magnitudes") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector b(20);
    for (Index i = 0; i < 20; ++i) b[i] = gauss(rng);
    const Index k = 1 + static_cast<Index>(trial % 10);
    const double gap_k = kth_largest_magnitude(b, k);
    const double gap_k1 = kth_largest_magnitude(b, k + 1);
    if (gap_k <= gap_k1 + 1e-12) continue;  // no strict rank gap
    const double lam = adaptive_lambda(b, k, 1.0, 0.0, LambdaRule::recompute);
    const Vector kept = half_threshold_vector(b, lam);
    Index nnz = 0;
    for (Index i = 0; i < 20; ++i) {
      if (kept[i] != 0.0) {
        ++nnz;
        CHECK(std::abs(b[i]) >= gap_k - 1e-12);
      }
    }
    CHECK(nnz == k);
  }
}

namespace {

ReturnsData planted_single_asset(Index n, Index t, Index target) {
  std::mt19937_64 rng(97);
  std::normal_distribution<double> gauss(0.0, 0.02);
  ReturnsData d;
  d.stock_returns.resize(t, n);
  for (Index row = 0; row < t; ++row)
    for (Index i = 0; i < n; ++i) d.stock_returns(row, i) = gauss(rng);
  d.index_returns = d.stock_returns.col(target);
  d.train_rows = t;
  return d;
}

}  // namespace

TEST_CASE("select_support recovers a planted single asset") {
  const auto d = planted_single_asset(10, 60, 7);
  TrackerConfig cfg;
  cfg.k = 1;
  cfg.bounds = {0.0, 1.0};
  const auto res = select_support(d.stock_returns, d.index_returns, cfg);
  REQUIRE(res.weights.support.size() == 1);
  CHECK(res.weights.support[0] == 7);
  CHECK(res.trace.converged);
  CHECK(res.trace.stop_reason == StopReason::support_stable);
}

TEST_CASE("select_support returns K assets for K = N-1") {
  const auto d = planted_single_asset(8, 40, 0);
  TrackerConfig cfg;
  cfg.k = 7;
  cfg.bounds = {0.0, 1.0};
  const auto res = select_support(d.stock_returns, d.index_returns, cfg);
  CHECK(res.weights.support.size() == 7);
}

TEST_CASE("select_support is deterministic") {
  const auto d = planted_single_asset(12, 50, 3);
  TrackerConfig cfg;
  cfg.k = 4;
  cfg.bounds = {0.01, 0.5};
  const auto a = select_support(d.stock_returns, d.index_returns, cfg);
  const auto b = select_support(d.stock_returns, d.index_returns, cfg);
  CHECK(a.weights.support == b.weights.support);
  CHECK(a.weights.weights == b.weights.weights);  // bitwise
  CHECK(a.trace.iterations == b.trace.iterations);
  CHECK(a.trace.lambda_history == b.trace.lambda_history);
}

TEST_CASE("lambda history is nonincreasing under monotone-min") {
  const auto d = planted_single_asset(12, 50, 3);
  TrackerConfig cfg;
  cfg.k = 4;
  cfg.bounds = {0.01, 0.5};
  cfg.rule = LambdaRule::monotone_min;
  const auto res = select_support(d.stock_returns, d.index_returns, cfg);
  for (std::size_t i = 1; i < res.trace.lambda_history.size(); ++i)
    CHECK(res.trace.lambda_history[i] <= res.trace.lambda_history[i - 1]);
}

TEST_CASE("select_support rejects infeasible configs") {
  const auto d = planted_single_asset(6, 30, 0);
  TrackerConfig cfg;
  cfg.k = 1;
  cfg.bounds = {0.01, 0.5};  // k * delta < 1
  CHECK_THROWS_AS(select_support(d.stock_returns, d.index_returns, cfg),
                  InfeasibleConfig);
  TrackerConfig big;
  big.k = 6;  // k must be < N
  big.bounds = {0.0, 1.0};
  CHECK_THROWS_AS(select_support(d.stock_returns, d.index_returns, big),
                  InfeasibleConfig);
}
