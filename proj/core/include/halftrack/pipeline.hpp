#pragma once

#include <string>
#include <vector>

#include "halftrack/half_threshold.hpp"
#include "halftrack/orlib.hpp"
#include "halftrack/types.hpp"

namespace halftrack {

enum class ModelKind { l12, l1, exhaustive };

ModelKind parse_model(const std::string& name);
std::string model_name(ModelKind m);

struct TrackResult {
  ModelKind model = ModelKind::l12;
  std::vector<Index> support;      // sorted ascending
  PortfolioWeights weights;        // full-length budget/bound-feasible vector
  double tei = 0.0;                // 1/T-normalized, train block
  double teo = 0.0;                // 1/T-normalized, test block
  double cons = 0.0;               // |tei - teo|
  int iterations = 0;
  double runtime_ms = 0.0;
  IterationTrace trace;            // populated by the l12 model only
  bool support_shortfall = false;  // stage 1 delivered fewer than K assets
  bool qp_converged = true;
};

// Hybrid half-thresholding strategy: support from the thresholding
// iteration on the train block, weights from the restricted QP, metrics
// on both blocks with the train-fitted weights frozen.
TrackResult track_l12(const ReturnsData& data, const TrackerConfig& cfg);

// Hybrid LARS strategy: support from the L1 path, then the same QP stage.
TrackResult track_l1(const ReturnsData& data, const TrackerConfig& cfg);

// Exact support search: solves the QP on every k-subset of the train
// columns (requires C(N,k) <= 10^6) and keeps the minimal in-sample
// objective, ties to the lexicographically smallest support.
TrackResult track_exhaustive(const ReturnsData& data, Index k, const Bounds& bounds);

// Shared stage 2: QP on a fixed support, metric evaluation on both blocks.
TrackResult finish_on_support(const ReturnsData& data,
                              const std::vector<Index>& support,
                              const Bounds& bounds, ModelKind model);

}  // namespace halftrack
