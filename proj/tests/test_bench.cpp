#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "halftrack/bench.hpp"

using namespace halftrack;

namespace {

// Deterministic OR-Library-format price file for sweep tests.
std::string write_synthetic_orlib(Index n, Index tp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.001, 0.02);
  std::uniform_real_distribution<double> start(10.0, 200.0);

  Matrix prices(tp, n);
  for (Index i = 0; i < n; ++i) {
    prices(0, i) = start(rng);
    for (Index t = 1; t < tp; ++t)
      prices(t, i) = prices(t - 1, i) * (1.0 + gauss(rng));
  }
  const auto dir = std::filesystem::temp_directory_path() / "halftrack_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / ("synth_" + std::to_string(seed) + ".txt");
  std::ofstream out(path);
  out << n << ' ' << tp << '\n';
  for (Index t = 0; t < tp; ++t) {
    out << prices.row(t).mean();  // index = equal-weight basket
    for (Index i = 0; i < n; ++i) out << ' ' << prices(t, i);
    out << '\n';
  }
  return path.string();
}

}  // namespace

TEST_CASE("cons") {
  CHECK(cons(5.81e-5, 4.19e-5) == doctest::Approx(1.62e-5).epsilon(1e-12));
  CHECK(cons(3e-5, 3e-5) == 0.0);
  CHECK(cons(0.0, 3e-5) == 3e-5);
}

TEST_CASE("supo") {
  // table-rounded inputs, +-0.2 percentage point tolerance
  CHECK(supo(7.22e-5, 4.19e-5) == doctest::Approx(41.91).epsilon(0.005));
  CHECK(supo(2.5e-4, 2.5e-4) == 0.0);
  CHECK(supo(1.02e-4, 1.20e-4) == doctest::Approx(-17.58).epsilon(0.01));
  CHECK_THROWS_AS(supo(0.0, 1e-5), ZeroBaseline);
  // sign convention: positive iff model 2 improves on model 1
  CHECK(supo(2e-4, 1e-4) > 0.0);
  CHECK(supo(1e-4, 2e-4) < 0.0);
}

TEST_CASE("run_experiment produces one sorted row per cell") {
  const auto path = write_synthetic_orlib(15, 61, 7);
  ExperimentSpec spec;
  spec.datasets.push_back({path, OrlibLayout::period_index_first});
  spec.k_values = {3, 4, 5};
  spec.models = {ModelKind::l12, ModelKind::l1};
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i - 1].k <= rows[i].k);
    if (rows[i - 1].k == rows[i].k) CHECK(rows[i - 1].model <= rows[i].model);
  }
  for (const auto& r : rows) {
    CHECK_FALSE(r.failed());
    CHECK(r.n_stocks == 15);
    CHECK(r.cons == cons(r.tei, r.teo));
    CHECK(static_cast<std::size_t>(r.k) >= 3);
  }
}

TEST_CASE("empty k_values is a validation error") {
  const auto path = write_synthetic_orlib(15, 61, 7);
  ExperimentSpec spec;
  spec.datasets.push_back({path, OrlibLayout::period_index_first});
  spec.models = {ModelKind::l12};
  CHECK_THROWS_AS(run_experiment(spec), ValidationError);
}

TEST_CASE("per-cell failures become error rows, other cells complete") {
  const auto path = write_synthetic_orlib(40, 41, 11);
  ExperimentSpec spec;
  spec.datasets.push_back({path, OrlibLayout::period_index_first});
  spec.k_values = {10};
  spec.models = {ModelKind::l12, ModelKind::exhaustive};  // C(40,10) too large
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 2);
  int failures = 0;
  for (const auto& r : rows) {
    if (r.failed()) {
      ++failures;
      CHECK(r.model == "exhaustive");
    }
  }
  CHECK(failures == 1);
}

TEST_CASE("csv output format") {
  const auto path = write_synthetic_orlib(15, 61, 7);
  ExperimentSpec spec;
  spec.datasets.push_back({path, OrlibLayout::period_index_first});
  spec.k_values = {3, 4, 5};
  spec.models = {ModelKind::l12, ModelKind::l1};
  const auto rows = run_experiment(spec);
  const std::string csv = csv_string(rows);

  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "dataset,n_stocks,k,model,tei,teo,cons,supo,seed,iterations,runtime_ms");
  int count = 0;
  while (std::getline(in, line)) {
    ++count;
    // no reference table given: supo is an empty field, not 0
    std::istringstream fields(line);
    std::string f;
    std::vector<std::string> cols;
    while (std::getline(fields, f, ',')) cols.push_back(f);
    CHECK(cols.size() >= 8);
    CHECK(cols[7].empty());
  }
  CHECK(count == 6);

  // byte-identical rerun
  const auto rows2 = run_experiment(spec);
  CHECK(csv_string(rows2) == csv);
}

TEST_CASE("reference table fills the supo column") {
  const auto path = write_synthetic_orlib(15, 61, 7);
  const auto dir = std::filesystem::temp_directory_path() / "halftrack_test";
  const auto ref_path = (dir / "ref.csv").string();
  {
    std::ofstream out(ref_path);
    const std::string label = std::filesystem::path(path).stem().string();
    out << "dataset,k,tei,teo\n" << label << ",3,1e-4,2e-4\n";
  }
  ExperimentSpec spec;
  spec.datasets.push_back({path, OrlibLayout::period_index_first});
  spec.k_values = {3, 4};
  spec.models = {ModelKind::l12};
  spec.reference = load_reference_table(ref_path);
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].supo_vs_reference.has_value());       // k=3 has a reference row
  CHECK_FALSE(rows[1].supo_vs_reference.has_value()); // k=4 does not
  CHECK(*rows[0].supo_vs_reference ==
        doctest::Approx(supo(2e-4, rows[0].teo)).epsilon(1e-12));
}

TEST_CASE("plot series: one file per dataset and metric, k rows") {
  const auto path = write_synthetic_orlib(15, 61, 7);
  ExperimentSpec spec;
  spec.datasets.push_back({path, OrlibLayout::period_index_first});
  spec.k_values = {3, 4, 5};
  spec.models = {ModelKind::l12, ModelKind::l1};
  const auto rows = run_experiment(spec);

  const auto dir = std::filesystem::temp_directory_path() / "halftrack_test" / "plots";
  std::filesystem::remove_all(dir);
  emit_plot_series(rows, dir.string());

  const std::string label = std::filesystem::path(path).stem().string();
  for (const char* metric : {"tei", "teo"}) {
    const auto f = dir / (label + "_" + metric + ".csv");
    REQUIRE(std::filesystem::exists(f));
    std::ifstream in(f);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "k,l1,l12");
    int count = 0;
    while (std::getline(in, line)) ++count;
    CHECK(count == 3);
  }
}

TEST_CASE("seed sweep appends a median row per cell group") {
  const auto path = write_synthetic_orlib(12, 41, 13);
  ExperimentSpec spec;
  spec.datasets.push_back({path, OrlibLayout::period_index_first});
  spec.k_values = {3};
  spec.models = {ModelKind::l12};
  spec.seeds = {42, 43, 44};
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 4);
  int medians = 0;
  for (const auto& r : rows)
    if (r.seed == "median") {
      ++medians;
      CHECK(r.cons == cons(r.tei, r.teo));
    }
  CHECK(medians == 1);
}

TEST_CASE("format_sci uses 6 significant digits") {
  CHECK(format_sci(5.81e-5) == "5.81000e-05");
  CHECK(format_sci(-17.58) == "-1.75800e+01");
  CHECK(format_sci(0.0) == "0.00000e+00");
}
