#include <benchmark/benchmark.h>

#include <random>

#include "halftrack/half_threshold.hpp"
#include "halftrack/qp.hpp"
#include "halftrack/types.hpp"

namespace {

using halftrack::Matrix;
using halftrack::Vector;

Matrix random_returns(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.01);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

void bm_half_threshold_vector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = gauss(rng);
  for (auto _ : state) {
    Vector out = halftrack::half_threshold_vector(x, 0.5);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(bm_half_threshold_vector)->Arg(100)->Arg(1000)->Arg(10000);

void bm_select_support(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int rows = 290;
  Matrix R = random_returns(rows, n, 11);
  Vector w_true = Vector::Zero(n);
  for (int i = 0; i < 5; ++i) w_true[i * (n / 5)] = 0.2;
  Vector y = R * w_true;
  halftrack::TrackerConfig cfg;
  cfg.k = 5;
  for (auto _ : state) {
    auto res = halftrack::select_support(R, y, cfg);
    benchmark::DoNotOptimize(res.weights.weights.data());
  }
}
BENCHMARK(bm_select_support)->Arg(31)->Arg(85)->Arg(225)->Unit(benchmark::kMillisecond);

void bm_solve_qp(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Matrix R = random_returns(290, k, 13);
  Vector w_true = Vector::Constant(k, 1.0 / k);
  Vector y = R * w_true;
  halftrack::QpProblem prob;
  prob.design = R;
  prob.target = y;
  prob.bounds = {0.001, 1.0};
  for (auto _ : state) {
    auto sol = halftrack::solve_qp(prob);
    benchmark::DoNotOptimize(sol.weights.data());
  }
}
BENCHMARK(bm_solve_qp)->Arg(5)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
