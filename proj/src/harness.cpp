#include "qap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "qap/annealing.hpp"
#include "qap/rng.hpp"
#include "qap/tabu_search.hpp"

namespace qap {

namespace {

RunRecord run_one(Heuristic h, const Instance& inst, std::uint64_t iterations,
                  std::uint64_t seed, const std::vector<double>& targets,
                  bool truncate) {
  if (h == Heuristic::kTabu) {
    TabuConfig cfg;
    cfg.iterations = iterations;
    cfg.seed = seed;
    return run_tabu(inst, cfg, targets, truncate);
  }
  SAConfig cfg;
  cfg.iterations = iterations;
  cfg.seed = seed;
  return run_sa(inst, cfg, targets, truncate);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

RunSet multi_start(Heuristic heuristic, const Instance& inst,
                   std::uint64_t iterations, const MultiStartOptions& options,
                   const std::vector<double>& targets) {
  if (options.runs < 1)
    throw ValidationError("multi_start: need at least one run");
  RunSet set;
  set.heuristic = heuristic;
  set.instance_name = inst.name;
  set.iterations = iterations;
  set.records.resize(options.runs);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t workers = std::min<std::uint64_t>(
      options.workers > 0 ? static_cast<unsigned>(options.workers) : hw,
      options.runs);

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= options.runs) return;
      try {
        set.records[k] =
            run_one(heuristic, inst, iterations,
                    derive_seed(options.base_seed, k), targets,
                    options.truncate_at_hit);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return set;
}

std::optional<double> t_bar_seconds(const RunSet& set, double q) {
  std::int64_t total_ns = 0;
  std::uint64_t successes = 0;
  for (const RunRecord& r : set.records) {
    if (std::find(r.targets.begin(), r.targets.end(), q) == r.targets.end())
      throw ValidationError(set.instance_name + ": target " +
                            format_double(q) + " was not recorded");
    total_ns += r.total_time_ns;
    if (r.hit_for(q)) ++successes;
  }
  if (successes == 0) return std::nullopt;
  return static_cast<double>(total_ns) / static_cast<double>(successes) / 1e9;
}

TbarSurface surface_from_runsets(const std::vector<RunSet>& sets,
                                 const std::vector<double>& targets) {
  if (sets.empty()) throw ValidationError("surface: no run sets");
  TbarSurface surface;
  surface.heuristic = sets.front().heuristic;
  surface.instance_name = sets.front().instance_name;
  surface.targets = targets;
  std::sort(surface.targets.begin(), surface.targets.end(), std::greater<>());
  surface.targets.erase(
      std::unique(surface.targets.begin(), surface.targets.end()),
      surface.targets.end());
  for (const RunSet& s : sets) {
    if (s.heuristic != surface.heuristic ||
        s.instance_name != surface.instance_name)
      throw ValidationError("surface: run sets disagree on heuristic/instance");
    surface.grid.push_back(s.iterations);
  }
  if (!std::is_sorted(surface.grid.begin(), surface.grid.end()) ||
      std::adjacent_find(surface.grid.begin(), surface.grid.end()) !=
          surface.grid.end())
    throw ValidationError("surface: budgets must be strictly ascending");

  surface.cells.resize(surface.targets.size());
  for (std::size_t qi = 0; qi < surface.targets.size(); ++qi) {
    const double q = surface.targets[qi];
    for (const RunSet& s : sets) {
      SurfaceCell cell;
      cell.iterations = s.iterations;
      cell.n_runs = s.records.size();
      cell.t_bar_seconds = t_bar_seconds(s, q);
      for (const RunRecord& r : s.records)
        if (r.hit_for(q)) ++cell.n_success;
      surface.cells[qi].push_back(cell);
    }
  }
  return surface;
}

QualityCurve curve_from_surface(const TbarSurface& surface) {
  QualityCurve curve;
  curve.heuristic = surface.heuristic;
  curve.instance_name = surface.instance_name;
  for (std::size_t qi = 0; qi < surface.targets.size(); ++qi) {
    const SurfaceCell* best = nullptr;
    for (const SurfaceCell& cell : surface.cells[qi]) {
      if (!cell.t_bar_seconds) continue;
      if (!best || *cell.t_bar_seconds < *best->t_bar_seconds) best = &cell;
    }
    if (!best) continue;  // target never attained at any budget
    curve.points[surface.targets[qi]] =
        CurvePoint{*best->t_bar_seconds, best->iterations, best->n_success,
                   best->n_runs};
  }
  return curve;
}

SweepResult iteration_sweep(Heuristic heuristic, const Instance& inst,
                            const std::vector<std::uint64_t>& grid,
                            const MultiStartOptions& options,
                            const std::vector<double>& targets) {
  if (grid.empty()) throw ValidationError("sweep: empty iteration grid");
  SweepResult result;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    MultiStartOptions cell_options = options;
    // Per-cell seeds keyed by the budget itself, so a cell's runs do not
    // depend on which other budgets the grid contains.
    cell_options.base_seed = derive_seed(options.base_seed, grid[gi]);
    result.runsets.push_back(
        multi_start(heuristic, inst, grid[gi], cell_options, targets));
  }
  result.surface = surface_from_runsets(result.runsets, targets);
  result.curve = curve_from_surface(result.surface);
  return result;
}

CrossoverReport crossover(const QualityCurve& sa_curve,
                          const QualityCurve& ts_curve) {
  if (sa_curve.heuristic != Heuristic::kAnnealing ||
      ts_curve.heuristic != Heuristic::kTabu)
    throw ValidationError("crossover: expected one sa curve and one ts curve");
  if (sa_curve.instance_name != ts_curve.instance_name)
    throw ValidationError("crossover: curves are for different instances (" +
                          sa_curve.instance_name + " vs " +
                          ts_curve.instance_name + ")");
  CrossoverReport report;
  report.instance_name = sa_curve.instance_name;
  for (const auto& [q, sa_point] : sa_curve.points) {
    auto it = ts_curve.points.find(q);
    if (it == ts_curve.points.end()) continue;
    report.common_q.push_back(q);
    report.t_bar_sa.push_back(sa_point.t_bar_seconds);
    report.t_bar_ts.push_back(it->second.t_bar_seconds);
  }
  if (report.common_q.size() < 2)
    throw ValidationError("crossover: need at least two comparable points");

  const std::size_t m = report.common_q.size();
  std::vector<double> diff(m);  // log T_sa - log T_ts
  for (std::size_t i = 0; i < m; ++i) {
    diff[i] = std::log(report.t_bar_sa[i]) - std::log(report.t_bar_ts[i]);
    if (diff[i] == 0) report.degenerate = true;
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (diff[i] != 0 && diff[i + 1] != 0 &&
        std::signbit(diff[i]) != std::signbit(diff[i + 1])) {
      report.brackets.push_back({report.common_q[i], report.common_q[i + 1]});
      if (report.brackets.size() == 1 && !report.degenerate) {
        const double f_lo = diff[i];
        const double f_hi = diff[i + 1];
        report.q_star = report.common_q[i] +
                        (report.common_q[i + 1] - report.common_q[i]) *
                            (-f_lo) / (f_hi - f_lo);
      }
    }
  }
  report.non_monotone = report.brackets.size() > 1;
  if (report.non_monotone || report.degenerate) report.q_star.reset();

  auto side = [](double d) {
    return d < 0 ? Heuristic::kAnnealing : Heuristic::kTabu;
  };
  if (diff.front() != 0) report.dominant_below = side(diff.front());
  if (diff.back() != 0) report.dominant_above = side(diff.back());
  return report;
}

namespace {

void write_meta(std::ostream& out, const char* format,
                const std::vector<std::string>& meta) {
  out << "# " << format << " v1\n";
  for (const std::string& line : meta) out << "# " << line << "\n";
}

}  // namespace

void write_curve_csv(const QualityCurve& curve, std::ostream& out,
                     const std::vector<std::string>& meta) {
  write_meta(out, "qap-curve", meta);
  out << "# instance=" << curve.instance_name << "\n";
  out << "# heuristic=" << to_string(curve.heuristic) << "\n";
  out << "Q,t_bar_seconds,i_opt,n_success,n_runs\n";
  for (const auto& [q, p] : curve.points)
    out << format_double(q) << "," << format_double(p.t_bar_seconds) << ","
        << p.i_opt << "," << p.n_success << "," << p.n_runs << "\n";
}

CurveFile read_curve_csv(std::istream& in) {
  CurveFile file;
  std::string line;
  bool header_seen = false;
  bool format_ok = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      if (body.rfind("qap-curve", 0) == 0) format_ok = true;
      const auto eq = body.find('=');
      if (eq != std::string::npos)
        file.meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      if (line != "Q,t_bar_seconds,i_opt,n_success,n_runs")
        throw ParseError("curve file: unexpected column header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 5)
      throw ParseError("curve file: expected 5 fields, got '" + line + "'");
    try {
      const double q = std::stod(fields[0]);
      CurvePoint p;
      p.t_bar_seconds = std::stod(fields[1]);
      p.i_opt = std::stoull(fields[2]);
      p.n_success = std::stoull(fields[3]);
      p.n_runs = std::stoull(fields[4]);
      file.curve.points[q] = p;
    } catch (const std::exception&) {
      throw ParseError("curve file: bad row '" + line + "'");
    }
  }
  if (!format_ok) throw ParseError("curve file: missing qap-curve header");
  auto it = file.meta.find("instance");
  if (it == file.meta.end())
    throw ParseError("curve file: missing instance metadata");
  file.curve.instance_name = it->second;
  it = file.meta.find("heuristic");
  if (it == file.meta.end())
    throw ParseError("curve file: missing heuristic metadata");
  file.curve.heuristic = heuristic_from_string(it->second);
  return file;
}

CurveFile read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open curve file: " + path);
  return read_curve_csv(in);
}

void write_surface_csv(const TbarSurface& surface, std::ostream& out,
                       const std::vector<std::string>& meta) {
  write_meta(out, "qap-surface", meta);
  out << "# instance=" << surface.instance_name << "\n";
  out << "# heuristic=" << to_string(surface.heuristic) << "\n";
  out << "Q,iterations,t_bar_seconds,n_success,n_runs\n";
  for (std::size_t qi = 0; qi < surface.targets.size(); ++qi) {
    for (const SurfaceCell& cell : surface.cells[qi]) {
      out << format_double(surface.targets[qi]) << "," << cell.iterations
          << ",";
      if (cell.t_bar_seconds)
        out << format_double(*cell.t_bar_seconds);
      else
        out << "undefined";
      out << "," << cell.n_success << "," << cell.n_runs << "\n";
    }
  }
}

void write_crossover_csv(const CrossoverReport& report, std::ostream& out,
                         const std::vector<std::string>& meta) {
  write_meta(out, "qap-crossover", meta);
  out << "# instance=" << report.instance_name << "\n";
  out << "instance,q_lo,q_hi,q_star,dominant_below,dominant_above,flags\n";
  std::string flags;
  if (report.non_monotone) flags += "non-monotone";
  if (report.degenerate) flags += flags.empty() ? "degenerate" : "+degenerate";
  auto name_or = [](const std::optional<Heuristic>& h) {
    return h ? to_string(*h) : std::string("none");
  };
  if (report.brackets.empty()) {
    out << report.instance_name << ",,,"
        << "," << name_or(report.dominant_below) << ","
        << name_or(report.dominant_above) << "," << flags << "\n";
    return;
  }
  for (const CrossoverBracket& b : report.brackets) {
    out << report.instance_name << "," << format_double(b.q_lo) << ","
        << format_double(b.q_hi) << ",";
    if (report.q_star) out << format_double(*report.q_star);
    out << "," << name_or(report.dominant_below) << ","
        << name_or(report.dominant_above) << "," << flags << "\n";
  }
}

void write_hardness_csv(const std::vector<CurveFile>& curves,
                        std::ostream& out,
                        const std::vector<std::string>& meta) {
  if (curves.empty()) throw ValidationError("hardness: no curves given");
  write_meta(out, "qap-hardness", meta);
  out << "instance,heuristic,Q,t_bar_seconds,i_opt,n_success,n_runs\n";
  for (const CurveFile& file : curves) {
    for (const auto& [q, p] : file.curve.points)
      out << file.curve.instance_name << "," << to_string(file.curve.heuristic)
          << "," << format_double(q) << "," << format_double(p.t_bar_seconds)
          << "," << p.i_opt << "," << p.n_success << "," << p.n_runs << "\n";
  }
}

}  // namespace qap
