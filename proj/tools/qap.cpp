// Command-line front end: solve single instances, run iteration sweeps,
// build T-bar quality curves, locate the SA/TS crossover, merge hardness
// tables, and brute-force tiny instances.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qap/annealing.hpp"
#include "qap/brute_force.hpp"
#include "qap/evaluation.hpp"
#include "qap/harness.hpp"
#include "qap/instance.hpp"
#include "qap/rng.hpp"
#include "qap/tabu_search.hpp"

namespace fs = std::filesystem;
using namespace qap;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: usage, data/contract, and I/O failures are distinct.
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitIo = 74;

std::string g_command_line;

// Bad command-line values discovered after CLI parsing.
struct UsageError : Error {
  using Error::Error;
};

std::vector<std::string> header_meta(std::uint64_t seed) {
  return {std::string("tool=qap ") + kVersion, "seed=" + std::to_string(seed),
          "cmd=" + g_command_line};
}

void print_header(std::uint64_t seed) {
  for (const std::string& line : header_meta(seed))
    std::cout << "# " << line << "\n";
}

std::string instance_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("QAP_INSTANCE_DIR")) return env;
  return "instances";
}

Instance resolve_instance(const std::string& name_or_path,
                          const std::string& dir_flag) {
  if (fs::exists(name_or_path) && fs::is_regular_file(name_or_path))
    return load_instance(name_or_path);
  const fs::path dir = instance_dir(dir_flag);
  for (const fs::path& candidate :
       {dir / name_or_path, dir / (name_or_path + ".dat")}) {
    if (fs::exists(candidate)) return load_instance(candidate.string());
  }
  throw IoError("instance '" + name_or_path + "' not found (looked in " +
                dir.string() + "; set --instances or QAP_INSTANCE_DIR)");
}

std::vector<std::uint64_t> parse_grid(const std::vector<std::string>& tokens) {
  std::vector<std::uint64_t> grid;
  for (const std::string& t : tokens) {
    double v = 0;
    try {
      v = std::stod(t);
    } catch (const std::exception&) {
      throw UsageError("bad grid value '" + t + "'");
    }
    if (!(v >= 1) || v != std::floor(v) || v > 9e18)
      throw UsageError("bad grid value '" + t + "'");
    grid.push_back(static_cast<std::uint64_t>(v));
  }
  if (grid.empty()) throw UsageError("iteration grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw UsageError("iteration grid must be strictly ascending");
  return grid;
}

RunRecord run_index(Heuristic h, const Instance& inst,
                    std::uint64_t iterations, std::uint64_t cell_base,
                    std::uint64_t k, const std::vector<double>& targets,
                    bool truncate) {
  if (h == Heuristic::kTabu) {
    TabuConfig cfg;
    cfg.iterations = iterations;
    cfg.seed = derive_seed(cell_base, k);
    return run_tabu(inst, cfg, targets, truncate);
  }
  SAConfig cfg;
  cfg.iterations = iterations;
  cfg.seed = derive_seed(cell_base, k);
  return run_sa(inst, cfg, targets, truncate);
}

std::string cell_log_path(const fs::path& out_dir, Heuristic h,
                          std::uint64_t iterations) {
  return (out_dir / ("runs_" + to_string(h) + "_I" +
                     std::to_string(iterations) + ".jsonl"))
      .string();
}

// One (heuristic, budget) cell of a sweep. An existing complete log is
// reused; a shorter one is topped up run by run (per-run seeds depend only
// on the run index, so a resumed cell equals an uninterrupted one).
RunSet sweep_cell(Heuristic h, const Instance& inst, std::uint64_t iterations,
                  const MultiStartOptions& options,
                  const std::vector<double>& targets, const fs::path& out_dir,
                  bool* reused) {
  const std::string path = cell_log_path(out_dir, h, iterations);
  MultiStartOptions cell = options;
  cell.base_seed = derive_seed(options.base_seed, iterations);
  RunSet set;
  std::uint64_t have = 0;
  if (fs::exists(path)) {
    const LoadResult loaded = load_runs(path);
    if (loaded.skipped_lines > 0)
      std::cerr << "warning: " << path << ": dropped " << loaded.skipped_lines
                << " corrupt line(s)\n";
    if (loaded.set.heuristic == h && loaded.set.iterations == iterations &&
        loaded.set.instance_name == inst.name) {
      set = loaded.set;
      have = set.records.size();
    }
  }
  *reused = have >= options.runs;
  if (*reused) {
    set.records.resize(options.runs);  // completed cell: leave the file alone
    return set;
  }
  if (have == 0) {
    set = multi_start(h, inst, iterations, cell, targets);
  } else {
    for (std::uint64_t k = have; k < options.runs; ++k)
      set.records.push_back(run_index(h, inst, iterations, cell.base_seed, k,
                                      targets, options.truncate_at_hit));
  }
  const std::string tmp = path + ".tmp";
  persist_runs(set, tmp);
  fs::rename(tmp, path);
  return set;
}

struct CommonArgs {
  std::string instance;
  std::string instances_dir;
  std::uint64_t seed = 1;
  std::int64_t best_known_override = -1;  // < 0: use the registry value
};

Instance resolve_with_override(const CommonArgs& common) {
  Instance inst = resolve_instance(common.instance, common.instances_dir);
  if (common.best_known_override >= 0)
    inst.best_known = common.best_known_override;
  return inst;
}

int cmd_solve(const CommonArgs& common, const std::string& heuristic,
              std::uint64_t iterations, const std::vector<double>& targets,
              std::string sln_path, bool truncate) {
  const Instance inst = resolve_with_override(common);
  const Heuristic h = heuristic_from_string(heuristic);
  print_header(common.seed);

  RunRecord record;
  Assignment best;
  if (h == Heuristic::kTabu) {
    TabuConfig cfg;
    cfg.iterations = iterations;
    cfg.seed = common.seed;
    record = run_tabu(inst, cfg, targets, truncate);
    TabuSearch search(inst, cfg);
    for (std::uint64_t k = 0; k < record.executed_iterations; ++k)
      search.step();
    best = {search.best_perm(), search.best_cost()};
  } else {
    SAConfig cfg;
    cfg.iterations = iterations;
    cfg.seed = common.seed;
    record = run_sa(inst, cfg, targets, truncate);
    SimulatedAnnealing search(inst, cfg);
    for (std::uint64_t k = 0; k < record.executed_iterations; ++k)
      search.trial();
    best = {search.best_perm(), search.best_cost()};
  }

  std::cout << "instance=" << inst.name << " n=" << inst.n
            << " heuristic=" << to_string(h) << " iterations=" << iterations
            << "\n";
  std::cout << "cost=" << record.final_best_cost << "\n";
  if (inst.best_known) {
    std::cout << "best_known=" << *inst.best_known << "\n";
    std::cout << "q="
              << (static_cast<double>(record.final_best_cost) -
                  static_cast<double>(*inst.best_known)) /
                     static_cast<double>(*inst.best_known)
              << "\n";
  }
  std::cout << "time_s=" << static_cast<double>(record.total_time_ns) / 1e9
            << "\n";
  for (const FirstHit& hit : record.first_hits)
    std::cout << "hit q=" << hit.q << " iteration=" << hit.iteration
              << " time_s=" << static_cast<double>(hit.time_ns) / 1e9 << "\n";

  if (sln_path.empty()) sln_path = inst.name + "." + to_string(h) + ".sln";
  std::ofstream out(sln_path);
  if (!out) throw IoError("cannot write solution file: " + sln_path);
  write_solution(inst, best, out);
  std::cout << "solution=" << sln_path << "\n";
  return 0;
}

int cmd_exact(const CommonArgs& common, int max_n) {
  const Instance inst = resolve_instance(common.instance, common.instances_dir);
  print_header(common.seed);
  const OracleResult result = brute_force(inst, max_n);
  std::cout << "instance=" << inst.name << " n=" << inst.n << "\n";
  std::cout << "optimal_cost=" << result.best.cost << "\n";
  std::cout << "optima_count=" << result.optimum_count << "\n";
  std::cout << "permutation=";
  for (int i = 0; i < inst.n; ++i)
    std::cout << (i ? " " : "") << result.best.perm[i] + 1;
  std::cout << "\n";
  return 0;
}

void emit_heuristic_outputs(const std::vector<RunSet>& sets,
                            const std::vector<double>& targets,
                            const fs::path& out_dir, Heuristic h,
                            std::uint64_t seed) {
  const TbarSurface surface = surface_from_runsets(sets, targets);
  const QualityCurve curve = curve_from_surface(surface);
  const std::string tag = to_string(h);
  {
    std::ofstream out(out_dir / ("surface_" + tag + ".csv"));
    write_surface_csv(surface, out, header_meta(seed));
  }
  {
    std::ofstream out(out_dir / ("curve_" + tag + ".csv"));
    write_curve_csv(curve, out, header_meta(seed));
  }
  std::cout << "heuristic=" << tag << " cells=" << sets.size()
            << " curve_points=" << curve.points.size() << "\n";
}

int cmd_sweep(const CommonArgs& common, const std::string& heuristic,
              const std::vector<std::string>& ts_grid_tokens,
              const std::vector<std::string>& sa_grid_tokens,
              std::uint64_t runs, const std::vector<double>& targets,
              const std::string& out, int workers, bool truncate) {
  const Instance inst = resolve_with_override(common);
  if (!targets.empty() && !inst.best_known)
    throw ValidationError(inst.name + ": targets need a best-known cost");
  const fs::path out_dir(out);
  fs::create_directories(out_dir);

  print_header(common.seed);
  MultiStartOptions options;
  options.runs = runs;
  options.base_seed = common.seed;
  options.workers = workers;
  options.truncate_at_hit = truncate;

  std::vector<Heuristic> heuristics;
  if (heuristic == "both")
    heuristics = {Heuristic::kTabu, Heuristic::kAnnealing};
  else
    heuristics = {heuristic_from_string(heuristic)};

  for (Heuristic h : heuristics) {
    const std::vector<std::uint64_t> grid =
        parse_grid(h == Heuristic::kTabu ? ts_grid_tokens : sa_grid_tokens);
    std::vector<RunSet> sets;
    for (std::uint64_t iterations : grid) {
      bool reused = false;
      sets.push_back(
          sweep_cell(h, inst, iterations, options, targets, out_dir, &reused));
      std::cout << "cell heuristic=" << to_string(h) << " I=" << iterations
                << (reused ? " reused" : " computed") << "\n";
    }
    emit_heuristic_outputs(sets, targets, out_dir, h, common.seed);
  }
  return 0;
}

int cmd_curve(const std::string& logs, const std::string& out,
              std::uint64_t seed) {
  const fs::path log_dir(logs);
  if (!fs::is_directory(log_dir)) throw IoError("not a directory: " + logs);
  const fs::path out_dir = out.empty() ? log_dir : fs::path(out);
  fs::create_directories(out_dir);
  print_header(seed);

  std::map<Heuristic, std::vector<RunSet>> by_heuristic;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(log_dir))
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    LoadResult loaded = load_runs(file.string());
    if (loaded.skipped_lines > 0)
      std::cerr << "warning: " << file << ": dropped " << loaded.skipped_lines
                << " corrupt line(s)\n";
    if (!loaded.set.records.empty())
      by_heuristic[loaded.set.heuristic].push_back(std::move(loaded.set));
  }
  if (by_heuristic.empty()) throw IoError("no run logs under " + logs);

  for (auto& [h, sets] : by_heuristic) {
    std::sort(sets.begin(), sets.end(), [](const RunSet& a, const RunSet& b) {
      return a.iterations < b.iterations;
    });
    // Keep the targets common to every record so t_bar is defined for all.
    std::vector<double> targets = sets.front().records.front().targets;
    for (const RunSet& s : sets)
      for (const RunRecord& r : s.records)
        std::erase_if(targets, [&](double q) {
          return std::find(r.targets.begin(), r.targets.end(), q) ==
                 r.targets.end();
        });
    emit_heuristic_outputs(sets, targets, out_dir, h, seed);
  }
  return 0;
}

int cmd_crossover(const std::string& sa_path, const std::string& ts_path,
                  const std::string& out, std::uint64_t seed) {
  const CurveFile sa = read_curve_csv(sa_path);
  const CurveFile ts = read_curve_csv(ts_path);
  const CrossoverReport report = crossover(sa.curve, ts.curve);
  print_header(seed);
  std::cout << "instance=" << report.instance_name << "\n";
  auto name_or = [](const std::optional<Heuristic>& h) {
    return h ? to_string(*h) : std::string("none");
  };
  if (report.brackets.empty()) {
    std::cout << "no crossover in sampled range; dominant="
              << name_or(report.dominant_below) << "\n";
  } else {
    for (const CrossoverBracket& b : report.brackets)
      std::cout << "bracket q_lo=" << b.q_lo << " q_hi=" << b.q_hi << "\n";
    if (report.q_star) std::cout << "q_star=" << *report.q_star << "\n";
    std::cout << "dominant_below=" << name_or(report.dominant_below)
              << " dominant_above=" << name_or(report.dominant_above) << "\n";
  }
  if (report.non_monotone) std::cout << "flag=non-monotone\n";
  if (report.degenerate) std::cout << "flag=degenerate\n";
  if (!out.empty()) {
    std::ofstream file(out);
    if (!file) throw IoError("cannot write: " + out);
    write_crossover_csv(report, file, header_meta(seed));
  }
  return 0;
}

int cmd_hardness(const std::vector<std::string>& curve_paths,
                 const std::string& out, std::uint64_t seed) {
  std::vector<CurveFile> curves;
  for (const std::string& path : curve_paths)
    curves.push_back(read_curve_csv(path));
  if (out.empty()) {
    write_hardness_csv(curves, std::cout, header_meta(seed));
  } else {
    std::ofstream file(out);
    if (!file) throw IoError("cannot write: " + out);
    write_hardness_csv(curves, file, header_meta(seed));
    print_header(seed);
    std::cout << "hardness_table=" << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::ostringstream echo;
  for (int i = 1; i < argc; ++i) echo << (i > 1 ? " " : "") << argv[i];
  g_command_line = echo.str();

  CLI::App app{
      "Quadratic assignment heuristics and their time-to-quality benchmark"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string heuristic = "ts";
  std::uint64_t iterations = 100000;
  std::vector<double> targets;
  std::string sln_path;
  bool truncate = false;
  int max_n = 10;
  std::vector<std::string> ts_grid{"1000",   "5000",   "10000", "50000",
                                   "100000", "500000", "1000000"};
  std::vector<std::string> sa_grid{"1000000",  "5000000",   "10000000",
                                   "50000000", "100000000", "500000000",
                                   "1000000000"};
  std::uint64_t runs = 20;
  std::string out_dir;
  int workers = 0;
  std::string logs_dir;
  std::string sa_curve_path, ts_curve_path, out_file;
  std::vector<std::string> curve_paths;
  std::string sweep_heuristic = "both";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--instance", common.instance,
                    "Instance name (resolved in the instances directory) or "
                    "file path")
        ->required();
    cmd->add_option("--instances", common.instances_dir,
                    "Instance directory (default: $QAP_INSTANCE_DIR or "
                    "./instances)");
    cmd->add_option("--seed", common.seed, "Base seed for all randomness");
    cmd->add_option("--best-known", common.best_known_override,
                    "Best-known cost override for unregistered instances");
  };

  CLI::App* solve = app.add_subcommand("solve", "Run one heuristic once");
  add_common(solve);
  solve->add_option("--heuristic", heuristic, "ts or sa")->required();
  solve->add_option("--iterations", iterations, "Iteration budget")
      ->required();
  solve->add_option("--targets", targets, "Quality targets to time")
      ->delimiter(',');
  solve->add_option("--sln", sln_path, "Solution file path");
  solve->add_flag("--truncate-at-hit", truncate,
                  "Stop once every target is hit (sensitivity analysis only)");

  CLI::App* exact = app.add_subcommand("exact", "Brute-force a tiny instance");
  add_common(exact);
  exact->add_option("--max-n", max_n, "Refuse instances larger than this");

  CLI::App* sweep = app.add_subcommand(
      "sweep",
      "Multi-start runs over an iteration grid; emits logs and tables");
  add_common(sweep);
  sweep->add_option("--heuristic", sweep_heuristic, "ts, sa, or both");
  sweep->add_option("--ts-grid", ts_grid, "Tabu iteration grid")
      ->delimiter(',');
  sweep->add_option("--sa-grid", sa_grid, "Annealing trial grid")
      ->delimiter(',');
  sweep->add_option("--runs", runs, "Runs per grid point");
  sweep->add_option("--targets", targets, "Quality targets")
      ->delimiter(',')
      ->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--workers", workers,
                    "Parallel worker cap (default: cores)");
  sweep->add_flag("--truncate-at-hit", truncate,
                  "Stop runs once every target is hit (off for reproduction)");

  CLI::App* curve = app.add_subcommand(
      "curve", "Rebuild surfaces and curves from persisted run logs");
  curve->add_option("--logs", logs_dir, "Directory of .jsonl run logs")
      ->required();
  curve->add_option("--out", out_file, "Output directory (default: --logs)");
  curve->add_option("--seed", common.seed, "Seed echoed into headers");

  CLI::App* cross =
      app.add_subcommand("crossover", "Locate Q* from a pair of curve files");
  cross->add_option("--sa", sa_curve_path, "Annealing curve CSV")->required();
  cross->add_option("--ts", ts_curve_path, "Tabu curve CSV")->required();
  cross->add_option("--out", out_file, "Write the report as CSV");
  cross->add_option("--seed", common.seed, "Seed echoed into headers");

  CLI::App* hardness = app.add_subcommand(
      "hardness", "Merge curve files into one instance-hardness table");
  hardness->add_option("curves", curve_paths, "Curve CSV files")->required();
  hardness->add_option("--out", out_file, "Output file (default: stdout)");
  hardness->add_option("--seed", common.seed, "Seed echoed into headers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (solve->parsed())
      return cmd_solve(common, heuristic, iterations, targets, sln_path,
                       truncate);
    if (exact->parsed()) return cmd_exact(common, max_n);
    if (sweep->parsed())
      return cmd_sweep(common, sweep_heuristic, ts_grid, sa_grid, runs,
                       targets, out_dir, workers, truncate);
    if (curve->parsed()) return cmd_curve(logs_dir, out_file, common.seed);
    if (cross->parsed())
      return cmd_crossover(sa_curve_path, ts_curve_path, out_file,
                           common.seed);
    if (hardness->parsed())
      return cmd_hardness(curve_paths, out_file, common.seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
  return kExitUsage;
}
