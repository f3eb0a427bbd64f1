#include "qap/annealing.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "qap/evaluation.hpp"

namespace qap {

CoolingState init_cooling(const Instance& inst, std::span<const int> perm,
                          std::uint64_t trial_budget) {
  Cost dmin = std::numeric_limits<Cost>::max();
  Cost dmax = 0;
  for (int i = 0; i < inst.n - 1; ++i) {
    for (int j = i + 1; j < inst.n; ++j) {
      const Cost d = swap_delta(inst, perm, i, j);
      if (d > 0) {
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
    }
  }
  CoolingState state;
  if (dmax == 0) {
    // Flat (or downhill-only) sample: any positive temperature behaves the
    // same, so pick a unit schedule with no cooling.
    state.t0 = 1.0;
    state.tf = 1.0;
    state.beta = 0.0;
  } else {
    state.t0 = static_cast<double>(dmin) +
               static_cast<double>(dmax - dmin) / 10.0;
    state.tf = static_cast<double>(dmin);
    state.beta = trial_budget > 0
                     ? (state.t0 - state.tf) /
                           (static_cast<double>(trial_budget) * state.t0 * state.tf)
                     : 0.0;
  }
  state.t = state.t0;
  state.t_found = state.t0;
  state.frozen = false;
  return state;
}

void cool_step(CoolingState& state, bool new_best, bool stalled) {
  if (new_best) state.t_found = state.t;
  if (state.frozen) return;
  state.t = state.t / (1.0 + state.beta * state.t);
  if (stalled) {
    state.frozen = true;
    state.beta = 0.0;
    state.t = state.t_found;
  }
}

SimulatedAnnealing::SimulatedAnnealing(const Instance& inst,
                                       const SAConfig& config)
    : inst_(inst), config_(config), rng_(config.seed), sweep_(inst.n) {
  const int n = inst.n;
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), 0);
  rng_.shuffle(perm_);
  cost_ = cost(inst, perm_);
  best_perm_ = perm_;
  best_cost_ = cost_;
  sweep_size_ = n >= 2 ? static_cast<std::uint64_t>(n) * (n - 1) / 2 : 1;
  cooling_ = init_cooling(inst, perm_, config.iterations);
}

void SimulatedAnnealing::trial() {
  ++trials_;
  if (inst_.n < 2) return;
  const auto [i, j] = sweep_.next();
  const Cost d = swap_delta(inst_, perm_, i, j);

  bool accepted = false;
  if (d < 0) {
    accepted = true;
  } else if (d == 0) {
    accepted = rng_.unit() < 0.5;
  } else if (cooling_.t > 0) {
    accepted = std::exp(-static_cast<double>(d) / cooling_.t) > rng_.unit();
  }

  bool new_best = false;
  if (accepted) {
    apply_swap(perm_, cost_, d, i, j);
    fail_count_ = 0;
    if (cost_ < best_cost_) {
      best_cost_ = cost_;
      best_perm_ = perm_;
      new_best = true;
    }
  } else {
    ++fail_count_;
  }
  const bool stalled = config_.lock_on_stall && !cooling_.frozen &&
                       fail_count_ >= sweep_size_;
  cool_step(cooling_, new_best, stalled);
}

RunRecord run_sa(const Instance& inst, const SAConfig& config,
                 const std::vector<double>& quality_targets,
                 bool truncate_at_hit) {
  TargetTracker tracker(quality_targets, inst.best_known, inst.name);
  const Stopwatch clock;
  SimulatedAnnealing search(inst, config);
  if (search.best_cost() <= tracker.watermark())
    tracker.record_hits(search.best_cost(), 0, clock.elapsed_ns());
  const bool may_truncate = truncate_at_hit && !tracker.targets().empty();
  std::uint64_t executed = 0;
  for (std::uint64_t k = 1;
       k <= config.iterations && !(may_truncate && tracker.all_hit()); ++k) {
    search.trial();
    ++executed;
    if (search.best_cost() <= tracker.watermark())
      tracker.record_hits(search.best_cost(), k, clock.elapsed_ns());
  }
  RunRecord record;
  record.heuristic = Heuristic::kAnnealing;
  record.instance_name = inst.name;
  record.seed = config.seed;
  record.iterations = config.iterations;
  record.executed_iterations = executed;
  record.total_time_ns = clock.elapsed_ns();
  record.targets = tracker.targets();
  record.first_hits = tracker.take_hits();
  record.final_best_cost = search.best_cost();
  record.best_known = inst.best_known;
  record.iteration_semantics = IterationSemantics::kSingleTrial;
  return record;
}

}  // namespace qap
