#include "halftrack/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "halftrack/log.hpp"

namespace halftrack {

double cons(double tei, double teo) {
  if (tei < 0.0 || teo < 0.0) throw ValidationError("cons: negative tracking error");
  return std::abs(tei - teo);
}

double supo(double teo1, double teo2) {
  if (!(teo1 > 0.0)) throw ZeroBaseline("supo: baseline TEO must be positive");
  return (teo1 - teo2) / teo1 * 100.0;
}

ReferenceTable load_reference_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open reference table " + path);
  ReferenceTable table;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      if (line.rfind("dataset,", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string dataset, k_str, tei_str, teo_str;
    if (!std::getline(ss, dataset, ',') || !std::getline(ss, k_str, ',') ||
        !std::getline(ss, tei_str, ',') || !std::getline(ss, teo_str, ','))
      throw ValidationError("bad reference row: " + line);
    try {
      table[{dataset, std::stoi(k_str)}] =
          ReferenceEntry{std::stod(tei_str), std::stod(teo_str)};
    } catch (const std::exception&) {
      throw ValidationError("bad reference row: " + line);
    }
  }
  return table;
}

void ExperimentSpec::validate() const {
  if (datasets.empty()) throw ValidationError("no datasets");
  if (k_values.empty()) throw ValidationError("no k values");
  if (models.empty()) throw ValidationError("no models");
  if (seeds.empty()) throw ValidationError("no seeds");
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  for (const int k : k_values) {
    TrackerConfig c = cfg;
    c.k = k;
    c.validate();
  }
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

namespace {

std::string dataset_label(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

struct Cell {
  std::size_t dataset_idx;
  int k;
  ModelKind model;
  std::uint64_t seed;
};

ResultRow run_cell(const ExperimentSpec& spec, const ReturnsData& data,
                   const std::string& label, const Cell& cell) {
  ResultRow row;
  row.dataset = label;
  row.n_stocks = data.n_stocks();
  row.k = cell.k;
  row.model = model_name(cell.model);
  row.seed = std::to_string(cell.seed);
  try {
    TrackerConfig cfg = spec.cfg;
    cfg.k = cell.k;
    cfg.seed = cell.seed;
    TrackResult tr;
    switch (cell.model) {
      case ModelKind::l12: tr = track_l12(data, cfg); break;
      case ModelKind::l1: tr = track_l1(data, cfg); break;
      case ModelKind::exhaustive:
        tr = track_exhaustive(data, cell.k, cfg.bounds);
        break;
    }
    row.tei = tr.tei;
    row.teo = tr.teo;
    row.cons = cons(tr.tei, tr.teo);
    row.iterations = tr.iterations;
    if (spec.measure_runtime) row.runtime_ms = tr.runtime_ms;
    if (spec.reference) {
      const auto it = spec.reference->find({label, cell.k});
      if (it != spec.reference->end() && it->second.teo > 0.0)
        row.supo_vs_reference = supo(it->second.teo, tr.teo);
    }
  } catch (const std::exception& e) {
    row.error = e.what();
    log::error("cell (", label, ", k=", cell.k, ", ", row.model, ") failed: ", e.what());
  }
  return row;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  // Parse every dataset once up front; a bad file is a validation error.
  std::vector<ReturnsData> datasets;
  std::vector<std::string> labels;
  for (const DatasetSpec& ds : spec.datasets) {
    const PricePanel panel = parse_orlib_file(ds.path, ds.layout);
    ReturnsData rd = to_returns(panel);
    rd = (spec.split_count > 0) ? split(rd, spec.split_count) : split_half(rd);
    datasets.push_back(std::move(rd));
    labels.push_back(dataset_label(ds.path));
  }

  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (const int k : spec.k_values)
      for (const ModelKind m : spec.models)
        for (const std::uint64_t s : spec.seeds)
          cells.push_back(Cell{d, k, m, s});

  std::vector<ResultRow> rows(cells.size());
  if (spec.jobs == 1 || cells.size() <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      rows[i] = run_cell(spec, datasets[cells[i].dataset_idx],
                         labels[cells[i].dataset_idx], cells[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
        rows[i] = run_cell(spec, datasets[cells[i].dataset_idx],
                           labels[cells[i].dataset_idx], cells[i]);
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(spec.jobs, static_cast<int>(cells.size()));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Median rows per (dataset, k, model) group when sweeping several seeds.
  if (spec.seeds.size() > 1) {
    std::vector<ResultRow> medians;
    for (std::size_t base = 0; base < rows.size(); base += spec.seeds.size()) {
      std::vector<double> teis, teos, iters;
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
        const ResultRow& r = rows[base + s];
        if (r.failed()) continue;
        teis.push_back(r.tei);
        teos.push_back(r.teo);
        iters.push_back(r.iterations);
      }
      if (teis.empty()) continue;
      ResultRow m = rows[base];
      m.seed = "median";
      m.error.clear();
      m.tei = median_of(teis);
      m.teo = median_of(teos);
      m.cons = cons(m.tei, m.teo);
      m.iterations = static_cast<int>(std::llround(median_of(iters)));
      m.runtime_ms.reset();
      if (spec.reference) {
        const auto it = spec.reference->find({m.dataset, m.k});
        m.supo_vs_reference.reset();
        if (it != spec.reference->end() && it->second.teo > 0.0)
          m.supo_vs_reference = supo(it->second.teo, m.teo);
      }
      medians.push_back(std::move(m));
    }
    rows.insert(rows.end(), medians.begin(), medians.end());
  }

  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.dataset != b.dataset) return a.dataset < b.dataset;
    if (a.k != b.k) return a.k < b.k;
    if (a.model != b.model) return a.model < b.model;
    return a.seed < b.seed;  // numeric seeds before "median" is not required
  });
  return rows;
}

std::string csv_string(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "dataset,n_stocks,k,model,tei,teo,cons,supo,seed,iterations,runtime_ms\n";
  for (const ResultRow& r : rows) {
    os << r.dataset << ',' << r.n_stocks << ',' << r.k << ',' << r.model << ',';
    if (r.failed()) {
      os << ",,,," << r.seed << ",,\n";
      continue;
    }
    os << format_sci(r.tei) << ',' << format_sci(r.teo) << ',' << format_sci(r.cons) << ',';
    if (r.supo_vs_reference) os << format_sci(*r.supo_vs_reference);
    os << ',' << r.seed << ',' << r.iterations << ',';
    if (r.runtime_ms) os << format_sci(*r.runtime_ms);
    os << '\n';
  }
  return os.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& destination) {
  if (rows.empty()) throw ValidationError("emit_csv: no rows");
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + destination);
  out << csv_string(rows);
  if (!out) throw IoFailure("write failed: " + destination);
}

void emit_plot_series(const std::vector<ResultRow>& rows, const std::string& directory) {
  if (rows.empty()) throw ValidationError("emit_plot_series: no rows");
  std::filesystem::create_directories(directory);

  std::set<std::string> datasets;
  std::set<std::string> models;
  std::set<int> ks;
  for (const ResultRow& r : rows) {
    if (r.failed() || r.seed == "median") continue;
    datasets.insert(r.dataset);
    models.insert(r.model);
    ks.insert(r.k);
  }

  for (const std::string& ds : datasets) {
    for (const char* metric : {"tei", "teo"}) {
      const auto path = std::filesystem::path(directory) / (ds + "_" + metric + ".csv");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw IoFailure("cannot write " + path.string());
      out << "k";
      for (const std::string& m : models) out << ',' << m;
      out << '\n';
      for (const int k : ks) {
        out << k;
        for (const std::string& m : models) {
          out << ',';
          for (const ResultRow& r : rows) {
            if (r.failed() || r.seed == "median") continue;
            if (r.dataset == ds && r.k == k && r.model == m) {
              out << format_sci(metric == std::string("tei") ? r.tei : r.teo);
              break;
            }
          }
        }
        out << '\n';
      }
    }
  }
}

}  // namespace halftrack
