#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qap/instance.hpp"
#include "qap/run_record.hpp"

namespace qap {

struct MultiStartOptions {
  std::uint64_t runs = 1;
  std::uint64_t base_seed = 0;
  int workers = 0;  // 0 = one per hardware thread
  bool truncate_at_hit = false;
};

// Executes `runs` independent runs at budget `iterations`; run k is seeded
// with derive_seed(base_seed, k). Runs may execute on parallel workers but
// the record order is always run-index order. Timing fields are trustworthy
// only while workers do not exceed physical cores.
RunSet multi_start(Heuristic heuristic, const Instance& inst,
                   std::uint64_t iterations, const MultiStartOptions& options,
                   const std::vector<double>& targets);

// Average time to quality q: the total time of ALL runs (failures included)
// divided by the number of runs that reached cost <= floor((1+q)*C_best).
// Empty when no run succeeded. Throws when q was not a recorded target.
std::optional<double> t_bar_seconds(const RunSet& set, double q);

struct SurfaceCell {
  std::uint64_t iterations = 0;
  std::optional<double> t_bar_seconds;
  std::uint64_t n_success = 0;
  std::uint64_t n_runs = 0;
};

// T-bar over the (target, budget) grid for one heuristic on one instance.
struct TbarSurface {
  Heuristic heuristic = Heuristic::kTabu;
  std::string instance_name;
  std::vector<double> targets;        // descending
  std::vector<std::uint64_t> grid;    // ascending
  std::vector<std::vector<SurfaceCell>> cells;  // cells[target][grid point]
};

struct CurvePoint {
  double t_bar_seconds = 0;
  std::uint64_t i_opt = 0;
  std::uint64_t n_success = 0;
  std::uint64_t n_runs = 0;
};

// For each quality target, the budget minimizing T-bar and that minimum.
struct QualityCurve {
  Heuristic heuristic = Heuristic::kTabu;
  std::string instance_name;
  std::map<double, CurvePoint> points;  // keyed by q, ascending
};

TbarSurface surface_from_runsets(const std::vector<RunSet>& sets,
                                 const std::vector<double>& targets);
// Ties on the minimum go to the smaller budget; targets with no defined
// T-bar anywhere are left out of the curve.
QualityCurve curve_from_surface(const TbarSurface& surface);

struct SweepResult {
  TbarSurface surface;
  QualityCurve curve;
  std::vector<RunSet> runsets;  // one per grid point, ascending budgets
};

SweepResult iteration_sweep(Heuristic heuristic, const Instance& inst,
                            const std::vector<std::uint64_t>& grid,
                            const MultiStartOptions& options,
                            const std::vector<double>& targets);

struct CrossoverBracket {
  double q_lo = 0;
  double q_hi = 0;
};

// Where the annealing and tabu curves cross: sign changes of
// log(T_sa) - log(T_ts) over the common quality grid.
struct CrossoverReport {
  std::string instance_name;
  std::vector<double> common_q;     // ascending
  std::vector<double> t_bar_sa;     // parallel to common_q
  std::vector<double> t_bar_ts;
  std::vector<CrossoverBracket> brackets;
  std::optional<double> q_star;     // only for a single clean bracket
  bool non_monotone = false;        // more than one sign change
  bool degenerate = false;          // equal T-bars somewhere on the grid
  std::optional<Heuristic> dominant_below;  // faster side at small q
  std::optional<Heuristic> dominant_above;  // faster side at large q
};

CrossoverReport crossover(const QualityCurve& sa_curve,
                          const QualityCurve& ts_curve);

// Comma-separated tables for plotting tools, prefixed with '#' metadata
// lines (written verbatim from `meta`, plus format/instance/heuristic).
void write_curve_csv(const QualityCurve& curve, std::ostream& out,
                     const std::vector<std::string>& meta = {});
struct CurveFile {
  QualityCurve curve;
  std::map<std::string, std::string> meta;
};
CurveFile read_curve_csv(std::istream& in);
CurveFile read_curve_csv(const std::string& path);

void write_surface_csv(const TbarSurface& surface, std::ostream& out,
                       const std::vector<std::string>& meta = {});

void write_crossover_csv(const CrossoverReport& report, std::ostream& out,
                         const std::vector<std::string>& meta = {});

// Merged hardness table (one row per instance/heuristic/target).
void write_hardness_csv(const std::vector<CurveFile>& curves,
                        std::ostream& out,
                        const std::vector<std::string>& meta = {});

}  // namespace qap
