#pragma once

#include <cstdint>
#include <vector>

#include "qap/evaluation.hpp"
#include "qap/instance.hpp"
#include "qap/rng.hpp"
#include "qap/run_record.hpp"

namespace qap {

struct TabuConfig {
  // Tenure is drawn uniformly from the integers in
  // [tenure_low_factor*N, tenure_high_factor*N], per entry per move.
  double tenure_low_factor = 0.9;
  double tenure_high_factor = 1.1;
  // A tabu move is admitted when one of its facility/location pairs has not
  // been occupied within the last aspiration_factor*N^2 iterations.
  double aspiration_factor = 2.0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
};

// Diagnostics for the move executed by the most recent step.
struct TabuMove {
  int i = -1;
  int j = -1;
  Cost delta = 0;
  bool tabu = false;           // move was tabu when selected
  bool aspired_best = false;   // admitted because it gave a new best
  bool aspired_long = false;   // admitted by the long-term occupation rule
  bool fallback = false;       // no admissible move existed
};

// Best-admissible-swap tabu search with a facility/location re-occupation
// ban of randomized tenure and a two-part aspiration rule.
class TabuSearch {
 public:
  TabuSearch(const Instance& inst, const TabuConfig& config);

  // One iteration: scan all N(N-1)/2 swaps against the delta table, apply
  // the best admissible one (ties to the first in lexicographic scan order),
  // stamp the tabu table, refresh the delta table.
  void step();

  std::uint64_t iteration() const { return iteration_; }
  const std::vector<int>& perm() const { return perm_; }
  Cost current_cost() const { return cost_; }
  Cost best_cost() const { return best_cost_; }
  const std::vector<int>& best_perm() const { return best_perm_; }
  // eligible(f, loc): first iteration at which placing facility f back on
  // location loc is permitted again.
  const Matrix& eligible() const { return eligible_; }
  const TabuMove& last_move() const { return last_move_; }

 private:
  int draw_tenure();

  const Instance& inst_;
  TabuConfig config_;
  Rng rng_;
  std::vector<int> perm_;
  Cost cost_ = 0;
  std::vector<int> best_perm_;
  Cost best_cost_ = 0;
  DeltaTable table_;
  Matrix eligible_;
  Matrix last_left_;  // iteration at which a facility last left a location
  std::uint64_t iteration_ = 0;
  std::int64_t aspiration_window_ = 0;
  int tenure_lo_ = 1;
  int tenure_hi_ = 1;
  TabuMove last_move_;
};

RunRecord run_tabu(const Instance& inst, const TabuConfig& config,
                   const std::vector<double>& quality_targets,
                   bool truncate_at_hit = false);

}  // namespace qap
