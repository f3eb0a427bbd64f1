#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qap/instance.hpp"
#include "qap/rng.hpp"
#include "qap/run_record.hpp"

namespace qap {

struct SAConfig {
  std::uint64_t iterations = 0;  // number of swap trials
  std::uint64_t seed = 0;
  // Test-only switch. When true (the default), a full sweep of consecutive
  // rejections locks the temperature at the value that produced the current
  // best solution for the remainder of the run; when false the schedule
  // always cools through to tf.
  bool lock_on_stall = true;
};

struct CoolingState {
  double t = 0;        // current temperature
  double beta = 0;     // per-trial cooling coefficient
  double t0 = 0;       // initial temperature
  double tf = 0;       // final temperature
  double t_found = 0;  // temperature at which the current best was found
  bool frozen = false;
};

// Samples the swap deltas of one full pair sweep on the start permutation:
// t0 = dmin + (dmax - dmin)/10 and tf = dmin over the positive deltas, with
// beta chosen so the schedule reaches tf after exactly trial_budget trials.
// A landscape with no positive delta degenerates to t0 = tf = 1, beta = 0.
CoolingState init_cooling(const Instance& inst, std::span<const int> perm,
                          std::uint64_t trial_budget);

// One schedule update, applied after every trial: T <- T/(1 + beta*T) unless
// frozen. A trial that produced a new best records the temperature the lock
// will use; a stalled trial (full sweep without an acceptance) engages the
// lock: beta = 0 and T jumps back to that recorded value.
void cool_step(CoolingState& state, bool new_best = false,
               bool stalled = false);

// Cyclic lexicographic enumeration of all unordered pairs of {0..n-1}.
class PairSweep {
 public:
  explicit PairSweep(int n) : n_(n) {}
  std::pair<int, int> next() {
    const std::pair<int, int> cur{i_, j_};
    if (++j_ >= n_) {
      if (++i_ >= n_ - 1) i_ = 0;
      j_ = i_ + 1;
    }
    return cur;
  }

 private:
  int n_;
  int i_ = 0;
  int j_ = 1;
};

// Annealing over the swap neighborhood: pairs are considered in a cyclic
// sweep, acceptance is delta < 0, delta = 0 with probability 1/2, or
// exp(-delta/T) > r, and the temperature cools after every trial. There are
// no tunable parameters; the schedule comes from init_cooling.
class SimulatedAnnealing {
 public:
  SimulatedAnnealing(const Instance& inst, const SAConfig& config);

  void trial();

  std::uint64_t trials() const { return trials_; }
  const std::vector<int>& perm() const { return perm_; }
  Cost current_cost() const { return cost_; }
  Cost best_cost() const { return best_cost_; }
  const std::vector<int>& best_perm() const { return best_perm_; }
  const CoolingState& cooling() const { return cooling_; }
  // Test hook: overrides the schedule computed by init_cooling.
  void set_cooling(const CoolingState& state) { cooling_ = state; }
  std::uint64_t consecutive_rejections() const { return fail_count_; }

 private:
  const Instance& inst_;
  SAConfig config_;
  Rng rng_;
  std::vector<int> perm_;
  Cost cost_ = 0;
  std::vector<int> best_perm_;
  Cost best_cost_ = 0;
  CoolingState cooling_;
  PairSweep sweep_;
  std::uint64_t trials_ = 0;
  std::uint64_t fail_count_ = 0;
  std::uint64_t sweep_size_ = 1;
};

RunRecord run_sa(const Instance& inst, const SAConfig& config,
                 const std::vector<double>& quality_targets,
                 bool truncate_at_hit = false);

}  // namespace qap
