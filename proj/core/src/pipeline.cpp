#include "halftrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "halftrack/lars.hpp"
#include "halftrack/log.hpp"
#include "halftrack/qp.hpp"
#include "halftrack/tracking.hpp"

namespace halftrack {

ModelKind parse_model(const std::string& name) {
  if (name == "l12") return ModelKind::l12;
  if (name == "l1") return ModelKind::l1;
  if (name == "exhaustive") return ModelKind::exhaustive;
  throw ValidationError("unknown model: " + name);
}

std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::l12: return "l12";
    case ModelKind::l1: return "l1";
    case ModelKind::exhaustive: return "exhaustive";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_split(const ReturnsData& data) {
  if (data.train_rows < 1 || data.test_rows < 1)
    throw ValidationError("data must carry a train/test split");
}

}  // namespace

TrackResult finish_on_support(const ReturnsData& data,
                              const std::vector<Index>& support,
                              const Bounds& bounds, ModelKind model) {
  require_split(data);
  if (support.empty()) throw ValidationError("empty support");

  QpProblem qp;
  qp.design.resize(data.train_rows, static_cast<Index>(support.size()));
  for (std::size_t a = 0; a < support.size(); ++a)
    qp.design.col(static_cast<Index>(a)) = data.train_matrix().col(support[a]);
  qp.target = data.train_index();
  qp.bounds = bounds;
  const QpSolution qs = solve_qp(qp);

  Vector full = Vector::Zero(data.n_stocks());
  for (std::size_t a = 0; a < support.size(); ++a)
    full[support[a]] = qs.weights[static_cast<Index>(a)];

  TrackResult r;
  r.model = model;
  r.support = support;
  std::sort(r.support.begin(), r.support.end());
  r.weights = PortfolioWeights::from_weights(full);
  r.tei = tracking_error(data.train_matrix(), data.train_index(), full, true);
  r.teo = tracking_error(data.test_matrix(), data.test_index(), full, true);
  r.cons = std::abs(r.tei - r.teo);
  r.qp_converged = qs.converged;
  return r;
}

TrackResult track_l12(const ReturnsData& data, const TrackerConfig& cfg) {
  const auto start = Clock::now();
  require_split(data);
  cfg.validate();

  SupportResult stage1 =
      select_support(data.train_matrix(), data.train_index(), cfg);
  if (cfg.refine) {
    // re-run stage 1 warm-started from the QP fit on the first support
    TrackResult first = finish_on_support(data, stage1.weights.support,
                                          cfg.bounds, ModelKind::l12);
    stage1 = select_support(data.train_matrix(), data.train_index(), cfg,
                            first.weights.weights);
  }

  if (stage1.weights.support.empty())
    throw InfeasibleConfig("thresholding selected an empty support");
  TrackResult r = finish_on_support(data, stage1.weights.support, cfg.bounds,
                                    ModelKind::l12);
  r.trace = stage1.trace;
  r.iterations = stage1.trace.iterations;
  r.support_shortfall = static_cast<Index>(r.support.size()) < cfg.k;
  if (r.support_shortfall)
    log::warn("l12 support shortfall: ", r.support.size(), " < ", cfg.k);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

TrackResult track_l1(const ReturnsData& data, const TrackerConfig& cfg) {
  const auto start = Clock::now();
  require_split(data);
  cfg.validate();

  const LarsState path =
      lars_path(data.train_matrix(), data.train_index(), cfg.k);
  std::vector<Index> support = path.active_set;
  std::sort(support.begin(), support.end());
  if (support.empty()) throw ValidationError("lars returned an empty support");

  TrackResult r = finish_on_support(data, support, cfg.bounds, ModelKind::l1);
  r.iterations = path.step_count;
  r.support_shortfall = path.path_exhausted;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

namespace {

// C(n, k) capped at the enumeration guard.
double binomial(Index n, Index k) {
  double v = 1.0;
  for (Index i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return v;
}

}  // namespace

TrackResult track_exhaustive(const ReturnsData& data, Index k, const Bounds& bounds) {
  const auto start = Clock::now();
  require_split(data);
  bounds.validate();
  const Index n = data.n_stocks();
  if (k < 1 || k > n) throw KOutOfRange("exhaustive: k out of range");
  if (k * bounds.eta > 1.0 + 1e-15 || k * bounds.delta < 1.0 - 1e-15)
    throw InfeasibleBounds("exhaustive: budget infeasible for k");
  if (binomial(n, k) > 1e6) throw TooLarge("C(N,k) exceeds 10^6 subsets");

  std::vector<Index> subset(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;

  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<Index> best_support;
  QpProblem qp;
  qp.bounds = bounds;
  qp.target = data.train_index();
  qp.design.resize(data.train_rows, k);

  long count = 0;
  while (true) {
    for (Index a = 0; a < k; ++a)
      qp.design.col(a) = data.train_matrix().col(subset[static_cast<std::size_t>(a)]);
    const QpSolution qs = solve_qp(qp);
    ++count;
    // strict improvement wins; enumeration order is lexicographic, so the
    // first subset reaching the minimum is the lexicographically smallest
    if (qs.objective < best_obj) {
      best_obj = qs.objective;
      best_support = subset;
    }

    // next k-combination of {0..n-1}
    Index pos = k - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (Index i = pos + 1; i < k; ++i)
      subset[static_cast<std::size_t>(i)] = subset[static_cast<std::size_t>(i - 1)] + 1;
  }
  log::debug("exhaustive enumerated ", count, " subsets");

  TrackResult r = finish_on_support(data, best_support, bounds, ModelKind::exhaustive);
  r.iterations = static_cast<int>(count);
  r.runtime_ms = elapsed_ms(start);
  return r;
}

}  // namespace halftrack
