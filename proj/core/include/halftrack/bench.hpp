#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halftrack/pipeline.hpp"

namespace halftrack {

// |TEI - TEO|: in/out-of-sample consistency.
double cons(double tei, double teo);

// (TEO1 - TEO2) / TEO1 * 100: percentage improvement of model 2's
// out-of-sample error over model 1's. Negative when model 2 is worse.
double supo(double teo1, double teo2);

// Reference TEI/TEO constants (e.g. the published comparison columns),
// keyed by (dataset label, k).
struct ReferenceEntry {
  double tei = 0.0;
  double teo = 0.0;
};
using ReferenceTable = std::map<std::pair<std::string, int>, ReferenceEntry>;

// CSV with header `dataset,k,tei,teo`; '#' lines are comments.
ReferenceTable load_reference_table(const std::string& path);

struct DatasetSpec {
  std::string path;
  OrlibLayout layout = OrlibLayout::period_index_first;
};

struct ExperimentSpec {
  std::vector<DatasetSpec> datasets;
  std::vector<int> k_values;
  std::vector<ModelKind> models;
  TrackerConfig cfg{};                  // template; k and seed set per cell
  std::vector<std::uint64_t> seeds{42};
  Index split_count = 0;                // 0 = floor(T/2)
  std::optional<ReferenceTable> reference;
  int jobs = 1;
  bool measure_runtime = false;         // keep CSV output byte-reproducible

  void validate() const;
};

struct ResultRow {
  std::string dataset;
  Index n_stocks = 0;
  int k = 0;
  std::string model;
  double tei = 0.0;
  double teo = 0.0;
  double cons = 0.0;
  std::optional<double> supo_vs_reference;
  std::string seed;                     // seed value or "median"
  int iterations = 0;
  std::optional<double> runtime_ms;
  std::string error;                    // nonempty: the cell failed

  bool failed() const { return !error.empty(); }
};

// One row per (dataset, K, model, seed), plus a median row per cell group
// when several seeds are given. Failures become error rows; the sweep
// never aborts. Rows come back sorted by (dataset, K, model, seed).
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

// Header: dataset,n_stocks,k,model,tei,teo,cons,supo,seed,iterations,runtime_ms
// Reals in scientific notation with 6 significant digits; absent values
// are empty fields, not zeros.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& destination);
std::string csv_string(const std::vector<ResultRow>& rows);

// One CSV per (dataset, metric in {tei, teo}) named <dataset>_<metric>.csv
// under `directory`, columns k,<model1>,<model2>,...
void emit_plot_series(const std::vector<ResultRow>& rows, const std::string& directory);

std::string format_sci(double v);

}  // namespace halftrack
