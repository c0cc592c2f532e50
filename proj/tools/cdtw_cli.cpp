// cdtw: command-line front end for the exact solver and the baselines.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdtw/baselines.hpp"
#include "cdtw/curve.hpp"
#include "cdtw/engine.hpp"
#include "cdtw/error.hpp"
#include "cdtw/io.hpp"

namespace fs = std::filesystem;
using namespace cdtw;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitOracle = 4;

// Thrown for bad flag combinations that CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MeasureOptions {
  std::string measure = "cdtw";
  unsigned resolution = 0;
  double epsilon = kDefaultEps;
};

double measure_value(const MeasureOptions& opt, const SeriesFile& a, const SeriesFile& b) {
  if (opt.measure == "dtw") return dtw(a.values, b.values);
  if (opt.measure == "dfrechet") return discrete_frechet(a.values, b.values);
  const Curve p(a.values), q(b.values);
  if (opt.measure == "cdtw-grid") return cdtw_grid(p, q, {opt.resolution, true});
  CdtwConfig cfg;
  cfg.eps = opt.epsilon;
  cfg.record_path = false;
  cfg.collect_stats = false;
  return cdtw_exact(p, q, cfg).value;
}

void check_measure(const MeasureOptions& opt) {
  if (opt.measure == "cdtw-grid" && opt.resolution == 0) {
    throw UsageError("--measure cdtw-grid needs --resolution R (R >= 1)");
  }
}

void add_measure_flags(CLI::App* cmd, MeasureOptions& opt) {
  cmd->add_option("--measure", opt.measure, "cdtw, dtw, dfrechet or cdtw-grid")
      ->check(CLI::IsMember({"cdtw", "dtw", "dfrechet", "cdtw-grid"}));
  cmd->add_option("--resolution", opt.resolution, "grid points per unit length (cdtw-grid)");
}

struct ComputeArgs {
  std::string a, b;
  MeasureOptions measure;
  bool stats = false;
  std::string path_out;
  std::string format = "json";
};

int run_compute(const ComputeArgs& args) {
  check_measure(args.measure);
  const SeriesFile a = read_series(args.a, &std::cerr);
  const SeriesFile b = read_series(args.b, &std::cerr);
  const bool exact = args.measure.measure == "cdtw";

  nlohmann::json out = {{"measure", args.measure.measure}};
  if (exact) {
    CdtwConfig cfg;
    cfg.eps = args.measure.epsilon;
    cfg.record_path = !args.path_out.empty();
    cfg.collect_stats = args.stats;
    const CdtwResult r = cdtw_exact(Curve(a.values), Curve(b.values), cfg);
    out["value"] = rounded(r.value);
    if (args.stats) out["stats"] = to_json(r.stats);
    if (r.path) {
      out["path"] = to_json(*r.path);
      std::ofstream f(args.path_out);
      if (!f) throw UsageError("cannot write " + args.path_out);
      f << to_json(*r.path).dump(2) << "\n";
    }
  } else {
    out["value"] = rounded(measure_value(args.measure, a, b));
  }
  out["n"] = a.values.size();
  out["m"] = b.values.size();

  if (args.format == "csv") {
    std::cout << "measure,value,n,m\n"
              << args.measure.measure << "," << format_number(out["value"].get<double>()) << ","
              << a.values.size() << "," << b.values.size() << "\n";
  } else {
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

struct MatrixArgs {
  std::string dir;
  MeasureOptions measure;
  unsigned jobs = 1;
  std::string output;
};

int run_matrix(const MatrixArgs& args) {
  check_measure(args.measure);
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(args.dir, ec))
    if (entry.is_regular_file()) files.push_back(entry.path());
  if (ec) throw UsageError("cannot read directory " + args.dir);
  if (files.size() < 2) throw UsageError("matrix needs at least 2 series files in " + args.dir);
  std::sort(files.begin(), files.end(),
            [](const fs::path& x, const fs::path& y) { return x.filename() < y.filename(); });

  std::vector<SeriesFile> series;
  for (const auto& f : files) series.push_back(read_series(f.string(), &std::cerr));

  const std::size_t n = series.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<double> matrix(n * n, 0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pairs.size()) return;
      const auto [i, j] = pairs[k];
      try {
        const double v = measure_value(args.measure, series[i], series[j]);
        matrix[i * n + j] = matrix[j * n + i] = v;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, args.jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::ostringstream csv;
  csv << "name";
  for (const auto& f : files) csv << "," << f.filename().string();
  csv << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv << files[i].filename().string();
    for (std::size_t j = 0; j < n; ++j) csv << "," << format_number(matrix[i * n + j]);
    csv << "\n";
  }
  if (args.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(args.output);
    if (!f) throw UsageError("cannot write " + args.output);
    f << csv.str();
  }
  return 0;
}

struct OracleArgs {
  std::string a, b;
  std::vector<unsigned> resolutions{4, 16, 64, 256};
  double tol_rel = 0.02;
  double tol_abs = 0.01;
};

int run_oracle_check(const OracleArgs& args) {
  if (args.resolutions.empty()) throw UsageError("--resolutions is empty");
  for (std::size_t k = 0; k < args.resolutions.size(); ++k) {
    if (args.resolutions[k] == 0) throw UsageError("resolutions must be positive");
    if (k > 0 && args.resolutions[k] <= args.resolutions[k - 1]) {
      throw UsageError("resolutions must be strictly ascending");
    }
  }
  const SeriesFile a = read_series(args.a, &std::cerr);
  const SeriesFile b = read_series(args.b, &std::cerr);
  const Curve p(a.values), q(b.values);
  CdtwConfig cfg;
  cfg.record_path = false;
  const double exact = cdtw_exact(p, q, cfg).value;

  bool ok = true;
  std::cout << "resolution,grid,gap\n";
  double prev_gap = 0.0;
  for (std::size_t k = 0; k < args.resolutions.size(); ++k) {
    const unsigned res = args.resolutions[k];
    const double grid = cdtw_grid(p, q, {res, true});
    const double gap = grid - exact;
    std::cout << res << "," << format_number(grid) << "," << format_number(gap) << "\n";
    if (grid < exact - 1e-9) {
      std::cerr << "violation: grid below exact value at resolution " << res << "\n";
      ok = false;
    }
    // Nested lattices can only improve.
    if (k > 0 && res % args.resolutions[k - 1] == 0 && gap > prev_gap + 1e-12 * (1.0 + grid)) {
      std::cerr << "violation: gap grew at resolution " << res << "\n";
      ok = false;
    }
    prev_gap = gap;
  }
  const double tol = args.tol_rel * exact + args.tol_abs;
  if (prev_gap > tol) {
    std::cerr << "violation: final gap " << format_number(prev_gap) << " exceeds "
              << format_number(tol) << "\n";
    ok = false;
  }
  std::cout << "exact," << format_number(exact) << "\n";
  return ok ? 0 : kExitOracle;
}

struct HeatmapArgs {
  std::string a, b;
  std::string out = "heatmap";
  int samples = 200;
};

int run_heatmap(const HeatmapArgs& args) {
  if (args.samples <= 0) throw UsageError("--samples must be positive");
  const SeriesFile a = read_series(args.a, &std::cerr);
  const SeriesFile b = read_series(args.b, &std::cerr);
  const Curve p(a.values), q(b.values);
  const CdtwResult r = cdtw_exact(p, q);

  auto open = [](const std::string& name) {
    std::ofstream f(name);
    if (!f) throw UsageError("cannot write " + name);
    return f;
  };
  auto coord = [&](double len, int k) {
    return args.samples == 1 ? 0.0 : len * k / (args.samples - 1);
  };

  std::ofstream hf = open(args.out + "_height.csv");
  hf << "x,y,h\n";
  for (int l = 0; l < args.samples; ++l) {
    for (int k = 0; k < args.samples; ++k) {
      const double x = coord(p.length(), k), y = coord(q.length(), l);
      hf << format_number(x) << "," << format_number(y) << "," << format_number(height(p, q, x, y))
         << "\n";
    }
  }

  std::ofstream pf = open(args.out + "_path.csv");
  pf << "x,y,leg\n";
  const WarpPath& path = *r.path;
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    pf << format_number(path.points[k].x) << "," << format_number(path.points[k].y) << ","
       << (k < path.legs.size() ? to_string(path.legs[k]) : "end") << "\n";
  }

  std::ofstream vf = open(args.out + "_valleys.csv");
  vf << "i,j,x0,y0,x1,y1\n";
  for (std::size_t i = 1; i <= p.segments(); ++i) {
    for (std::size_t j = 1; j <= q.segments(); ++j) {
      const Cell c = cell_info(p, q, i, j);
      if (!c.valley) continue;
      vf << i << "," << j << "," << format_number(c.valley->from.x) << ","
         << format_number(c.valley->from.y) << "," << format_number(c.valley->to.x) << ","
         << format_number(c.valley->to.y) << "\n";
    }
  }
  if (!hf || !pf || !vf) throw UsageError("write failed for prefix " + args.out);
  std::cout << "value," << format_number(r.value) << "\n";
  return 0;
}

bool solver_fault(ErrorCode code) {
  return code == ErrorCode::InvariantViolation || code == ErrorCode::CoverageGap ||
         code == ErrorCode::ProvenanceMissing || code == ErrorCode::WrongCellType;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact continuous dynamic time warping for 1D polygonal curves"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "distance between two series");
  c->add_option("a", compute.a)->required();
  c->add_option("b", compute.b)->required();
  add_measure_flags(c, compute.measure);
  c->add_option("--epsilon", compute.measure.epsilon, "numeric tolerance");
  c->add_flag("--stats", compute.stats, "include solver statistics");
  c->add_option("--path", compute.path_out, "write the optimal path as JSON");
  c->add_option("--format", compute.format)->check(CLI::IsMember({"json", "csv"}));

  MatrixArgs matrix;
  auto* m = app.add_subcommand("matrix", "all-pairs distance matrix of a directory");
  m->add_option("dir", matrix.dir)->required();
  add_measure_flags(m, matrix.measure);
  m->add_option("--jobs", matrix.jobs, "worker threads");
  m->add_option("--output", matrix.output, "CSV file (default stdout)");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle-check", "compare the exact value with grid approximations");
  o->add_option("a", oracle.a)->required();
  o->add_option("b", oracle.b)->required();
  o->add_option("--resolutions", oracle.resolutions)->delimiter(',');
  o->add_option("--tol-rel", oracle.tol_rel);
  o->add_option("--tol-abs", oracle.tol_abs);

  HeatmapArgs heat;
  auto* h = app.add_subcommand("heatmap", "dump height field, path and valleys as CSV");
  h->add_option("a", heat.a)->required();
  h->add_option("b", heat.b)->required();
  h->add_option("--out", heat.out, "output prefix");
  h->add_option("--samples", heat.samples, "samples per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c) return run_compute(compute);
    if (*m) return run_matrix(matrix);
    if (*o) return run_oracle_check(oracle);
    if (*h) return run_heatmap(heat);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return solver_fault(e.code()) ? kExitSolver : kExitUsage;
  }
  return kExitUsage;
}
