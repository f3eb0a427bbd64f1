#include "qap/tabu_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qap {

namespace {

void check_config(const TabuConfig& c) {
  if (!(c.tenure_low_factor > 0) ||
      !(c.tenure_low_factor <= c.tenure_high_factor))
    throw ValidationError("tabu config: need 0 < tenure_low_factor <= tenure_high_factor");
  if (c.aspiration_factor < 0)
    throw ValidationError("tabu config: aspiration_factor must be >= 0");
}

}  // namespace

TabuSearch::TabuSearch(const Instance& inst, const TabuConfig& config)
    : inst_(inst), config_(config), rng_(config.seed) {
  check_config(config);
  const int n = inst.n;
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), 0);
  rng_.shuffle(perm_);
  cost_ = cost(inst, perm_);
  best_perm_ = perm_;
  best_cost_ = cost_;
  table_ = build_delta_table(inst, perm_);
  eligible_ = Matrix(n, 0);
  last_left_ = Matrix(n, 0);
  aspiration_window_ = static_cast<std::int64_t>(
      std::llround(config.aspiration_factor * n * n));
  tenure_lo_ = static_cast<int>(std::ceil(config.tenure_low_factor * n - 1e-9));
  tenure_hi_ = static_cast<int>(std::floor(config.tenure_high_factor * n + 1e-9));
  tenure_lo_ = std::max(tenure_lo_, 1);
  tenure_hi_ = std::max(tenure_hi_, tenure_lo_);
}

int TabuSearch::draw_tenure() {
  return static_cast<int>(rng_.uniform_int(tenure_lo_, tenure_hi_));
}

void TabuSearch::step() {
  const int n = inst_.n;
  const auto k = static_cast<std::int64_t>(++iteration_);
  if (n < 2) return;  // no moves exist; the iteration still counts

  Cost best_delta = std::numeric_limits<Cost>::max();
  int bi = -1, bj = -1;
  bool best_tabu = false, best_asp_best = false, best_asp_long = false;
  Cost fallback_delta = std::numeric_limits<Cost>::max();
  int fi = -1, fj = -1;

  for (int i = 0; i < n - 1; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Cost d = table_.delta(i, j);
      if (d < fallback_delta) {
        fallback_delta = d;
        fi = i;
        fj = j;
      }
      const bool tabu =
          eligible_(i, perm_[j]) > k && eligible_(j, perm_[i]) > k;
      bool asp_best = false, asp_long = false;
      if (tabu) {
        asp_best = cost_ + d < best_cost_;
        asp_long = k - last_left_(i, perm_[j]) >= aspiration_window_ ||
                   k - last_left_(j, perm_[i]) >= aspiration_window_;
        if (!asp_best && !asp_long) continue;
      }
      if (d < best_delta) {
        best_delta = d;
        bi = i;
        bj = j;
        best_tabu = tabu;
        best_asp_best = asp_best;
        best_asp_long = asp_long;
      }
    }
  }

  TabuMove move;
  if (bi >= 0) {
    move = {bi, bj, best_delta, best_tabu, best_asp_best, best_asp_long, false};
  } else {
    move = {fi, fj, fallback_delta, true, false, false, true};
  }

  const int old_i = perm_[move.i];
  const int old_j = perm_[move.j];
  apply_swap(perm_, cost_, move.delta, move.i, move.j);
  // The re-occupation ban: facility may not return to the location it just
  // left before iteration k + tenure. max() keeps cells nondecreasing when a
  // facility bounces back quickly through the other pair's eligibility.
  eligible_(move.i, old_i) =
      std::max(eligible_(move.i, old_i), k + draw_tenure());
  eligible_(move.j, old_j) =
      std::max(eligible_(move.j, old_j), k + draw_tenure());
  last_left_(move.i, old_i) = k;
  last_left_(move.j, old_j) = k;
  update_delta_table(table_, inst_, perm_, move.i, move.j);
  if (cost_ < best_cost_) {
    best_cost_ = cost_;
    best_perm_ = perm_;
  }
  last_move_ = move;
}

RunRecord run_tabu(const Instance& inst, const TabuConfig& config,
                   const std::vector<double>& quality_targets,
                   bool truncate_at_hit) {
  TargetTracker tracker(quality_targets, inst.best_known, inst.name);
  const Stopwatch clock;
  TabuSearch search(inst, config);
  if (search.best_cost() <= tracker.watermark())
    tracker.record_hits(search.best_cost(), 0, clock.elapsed_ns());
  const bool may_truncate = truncate_at_hit && !tracker.targets().empty();
  std::uint64_t executed = 0;
  for (std::uint64_t k = 1;
       k <= config.iterations && !(may_truncate && tracker.all_hit()); ++k) {
    search.step();
    ++executed;
    if (search.best_cost() <= tracker.watermark())
      tracker.record_hits(search.best_cost(), k, clock.elapsed_ns());
  }
  RunRecord record;
  record.heuristic = Heuristic::kTabu;
  record.instance_name = inst.name;
  record.seed = config.seed;
  record.iterations = config.iterations;
  record.executed_iterations = executed;
  record.total_time_ns = clock.elapsed_ns();
  record.targets = tracker.targets();
  record.first_hits = tracker.take_hits();
  record.final_best_cost = search.best_cost();
  record.best_known = inst.best_known;
  record.iteration_semantics = IterationSemantics::kNeighborhoodScan;
  return record;
}

}  // namespace qap
