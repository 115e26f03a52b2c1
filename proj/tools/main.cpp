// halftrack CLI: parse OR-Library price files, run a single tracking
// model, or sweep (dataset x K x model x seed) grids to CSV.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "halftrack/bench.hpp"
#include "halftrack/errors.hpp"
#include "halftrack/orlib.hpp"
#include "halftrack/pipeline.hpp"

namespace {

using halftrack::Index;
using nlohmann::json;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

const char* stop_reason_name(halftrack::StopReason r) {
  switch (r) {
    case halftrack::StopReason::support_stable: return "support-stable";
    case halftrack::StopReason::max_iters: return "max-iters";
    case halftrack::StopReason::stalled: return "stalled";
  }
  return "?";
}

int cmd_parse(const std::string& input, const std::string& layout) {
  const auto panel =
      halftrack::parse_orlib_file(input, halftrack::parse_layout(layout));
  const auto data = halftrack::to_returns(panel);
  std::cout << "file: " << input << "\n"
            << "layout: " << layout << "\n"
            << "n_stocks: " << panel.n_stocks() << "\n"
            << "n_periods: " << panel.n_periods() << "\n"
            << "return_rows: " << data.n_periods() << "\n"
            << "index_price_range: [" << panel.index_prices.minCoeff() << ", "
            << panel.index_prices.maxCoeff() << "]\n"
            << "index_return_mean: " << data.index_returns.mean() << "\n"
            << "stock_return_mean: " << data.stock_returns.mean() << "\n";
  return 0;
}

struct RunOptions {
  std::string data;
  std::string layout = "period-index-first";
  std::string model = "l12";
  int k = 5;
  double eta = 0.01;
  double delta = 0.5;
  double epsilon = 0.01;
  Index split_count = 0;
  std::uint64_t seed = 42;
  std::string rule = "recompute";
  bool refine = false;
  std::string out;
};

int cmd_run(const RunOptions& opt) {
  const auto panel =
      halftrack::parse_orlib_file(opt.data, halftrack::parse_layout(opt.layout));
  auto data = halftrack::to_returns(panel);
  data = (opt.split_count > 0) ? halftrack::split(data, opt.split_count)
                               : halftrack::split_half(data);

  halftrack::TrackerConfig cfg;
  cfg.k = opt.k;
  cfg.bounds = {opt.eta, opt.delta};
  cfg.epsilon = opt.epsilon;
  cfg.seed = opt.seed;
  cfg.refine = opt.refine;
  if (opt.rule == "recompute")
    cfg.rule = halftrack::LambdaRule::recompute;
  else if (opt.rule == "monotone-min")
    cfg.rule = halftrack::LambdaRule::monotone_min;
  else
    throw halftrack::ValidationError("unknown rule: " + opt.rule);

  const halftrack::ModelKind model = halftrack::parse_model(opt.model);
  halftrack::TrackResult r;
  switch (model) {
    case halftrack::ModelKind::l12: r = halftrack::track_l12(data, cfg); break;
    case halftrack::ModelKind::l1: r = halftrack::track_l1(data, cfg); break;
    case halftrack::ModelKind::exhaustive:
      r = halftrack::track_exhaustive(data, opt.k, cfg.bounds);
      break;
  }

  std::cout << "model: " << halftrack::model_name(r.model) << "\n"
            << "dataset: " << opt.data << "\n"
            << "n_stocks: " << data.n_stocks() << "\n"
            << "split: " << data.train_rows << "/" << data.test_rows << "\n"
            << "k: " << opt.k << "\n"
            << "support:";
  for (const Index i : r.support) std::cout << ' ' << i;
  std::cout << "\nweights:";
  for (const Index i : r.support) std::cout << ' ' << r.weights.weights[i];
  std::cout << "\ntei: " << halftrack::format_sci(r.tei) << "\n"
            << "teo: " << halftrack::format_sci(r.teo) << "\n"
            << "cons: " << halftrack::format_sci(r.cons) << "\n"
            << "iterations: " << r.iterations << "\n"
            << "runtime_ms: " << r.runtime_ms << "\n";
  if (r.model == halftrack::ModelKind::l12)
    std::cout << "stop_reason: " << stop_reason_name(r.trace.stop_reason) << "\n";
  if (r.support_shortfall) std::cout << "support_shortfall: true\n";

  if (!opt.out.empty()) {
    json j;
    j["model"] = halftrack::model_name(r.model);
    j["dataset"] = opt.data;
    j["n_stocks"] = data.n_stocks();
    j["train_rows"] = data.train_rows;
    j["test_rows"] = data.test_rows;
    j["k"] = opt.k;
    j["support"] = r.support;
    json weights = json::array();
    for (const Index i : r.support) weights.push_back(r.weights.weights[i]);
    j["weights"] = weights;
    j["tei"] = r.tei;
    j["teo"] = r.teo;
    j["cons"] = r.cons;
    j["iterations"] = r.iterations;
    j["runtime_ms"] = r.runtime_ms;
    j["support_shortfall"] = r.support_shortfall;
    j["qp_converged"] = r.qp_converged;
    if (r.model == halftrack::ModelKind::l12)
      j["stop_reason"] = stop_reason_name(r.trace.stop_reason);
    std::ofstream out(opt.out);
    if (!out) throw halftrack::IoFailure("cannot write " + opt.out);
    out << j.dump(2) << "\n";
  }
  return 0;
}

struct SweepOptions {
  std::string data;
  std::string layout = "period-index-first";
  int k_min = 5;
  int k_max = 10;
  std::string models = "l12,l1";
  std::string csv;
  std::string plot_dir;
  std::string reference;
  std::string seeds = "42";
  int jobs = 1;
  double eta = 0.01;
  double delta = 0.5;
  double epsilon = 0.01;
  Index split_count = 0;
  bool measure_runtime = false;
};

int cmd_sweep(const SweepOptions& opt) {
  halftrack::ExperimentSpec spec;
  const auto layout = halftrack::parse_layout(opt.layout);
  for (const auto& p : split_list(opt.data))
    spec.datasets.push_back({p, layout});
  if (opt.k_min < 1 || opt.k_max < opt.k_min)
    throw halftrack::ValidationError("need 1 <= k-min <= k-max");
  for (int k = opt.k_min; k <= opt.k_max; ++k) spec.k_values.push_back(k);
  for (const auto& m : split_list(opt.models))
    spec.models.push_back(halftrack::parse_model(m));
  spec.seeds.clear();
  for (const auto& s : split_list(opt.seeds))
    spec.seeds.push_back(std::stoull(s));
  spec.cfg.bounds = {opt.eta, opt.delta};
  spec.cfg.epsilon = opt.epsilon;
  spec.split_count = opt.split_count;
  spec.jobs = opt.jobs;
  spec.measure_runtime = opt.measure_runtime;
  if (!opt.reference.empty())
    spec.reference = halftrack::load_reference_table(opt.reference);

  const auto rows = halftrack::run_experiment(spec);
  halftrack::emit_csv(rows, opt.csv);
  if (!opt.plot_dir.empty()) halftrack::emit_plot_series(rows, opt.plot_dir);

  int failures = 0;
  for (const auto& r : rows)
    if (r.failed()) ++failures;
  std::cout << "rows: " << rows.size() << ", failures: " << failures
            << ", csv: " << opt.csv << "\n";
  return failures > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse index tracking via hybrid half-thresholding"};
  app.require_subcommand(1);

  std::string parse_input, parse_layout_name = "period-index-first";
  auto* parse_cmd = app.add_subcommand("parse", "Parse a price file and print stats");
  parse_cmd->add_option("--input", parse_input, "OR-Library price file")->required();
  parse_cmd->add_option("--layout", parse_layout_name,
                        "period-index-first|period-index-last|series-index-first|series-index-last");

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Run one model on one dataset");
  run_cmd->add_option("--data", run_opt.data, "OR-Library price file")->required();
  run_cmd->add_option("--layout", run_opt.layout, "token layout");
  run_cmd->add_option("--model", run_opt.model, "l12|l1|exhaustive");
  run_cmd->add_option("--k", run_opt.k, "target cardinality");
  run_cmd->add_option("--eta", run_opt.eta, "lower weight bound");
  run_cmd->add_option("--delta", run_opt.delta, "upper weight bound");
  run_cmd->add_option("--epsilon", run_opt.epsilon, "step-size margin");
  run_cmd->add_option("--split-count", run_opt.split_count, "training rows (default: half)");
  run_cmd->add_option("--seed", run_opt.seed, "seed for seeded-random init");
  run_cmd->add_option("--rule", run_opt.rule, "recompute|monotone-min");
  run_cmd->add_flag("--refine", run_opt.refine, "re-threshold after the QP stage");
  run_cmd->add_option("--out", run_opt.out, "write the result as JSON here");

  SweepOptions sweep_opt;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep (dataset x K x model x seed) to CSV");
  sweep_cmd->add_option("--data", sweep_opt.data, "comma-separated price files")->required();
  sweep_cmd->add_option("--layout", sweep_opt.layout, "token layout (all files)");
  sweep_cmd->add_option("--k-min", sweep_opt.k_min, "smallest K");
  sweep_cmd->add_option("--k-max", sweep_opt.k_max, "largest K");
  sweep_cmd->add_option("--models", sweep_opt.models, "comma-separated subset of l12,l1,exhaustive");
  sweep_cmd->add_option("--csv", sweep_opt.csv, "output CSV path")->required();
  sweep_cmd->add_option("--plot-dir", sweep_opt.plot_dir, "emit per-(dataset,metric) plot series here");
  sweep_cmd->add_option("--reference", sweep_opt.reference, "reference constants for the SupO column");
  sweep_cmd->add_option("--seeds", sweep_opt.seeds, "comma-separated seeds");
  sweep_cmd->add_option("--jobs", sweep_opt.jobs, "worker threads");
  sweep_cmd->add_option("--eta", sweep_opt.eta, "lower weight bound");
  sweep_cmd->add_option("--delta", sweep_opt.delta, "upper weight bound");
  sweep_cmd->add_option("--epsilon", sweep_opt.epsilon, "step-size margin");
  sweep_cmd->add_option("--split-count", sweep_opt.split_count, "training rows (default: half)");
  sweep_cmd->add_flag("--measure-runtime", sweep_opt.measure_runtime,
                      "fill the runtime_ms column (breaks byte-reproducibility)");

  try {
    app.parse(argc, argv);
    if (parse_cmd->parsed()) return cmd_parse(parse_input, parse_layout_name);
    if (run_cmd->parsed()) return cmd_run(run_opt);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opt);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
