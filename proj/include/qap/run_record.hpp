#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qap/instance.hpp"

namespace qap {

enum class Heuristic { kTabu, kAnnealing };
// What one unit of the iteration budget means: a full neighborhood scan for
// tabu search, a single swap trial for annealing. Budgets of the two
// heuristics are therefore never directly comparable.
enum class IterationSemantics { kNeighborhoodScan, kSingleTrial };

std::string to_string(Heuristic h);
std::string to_string(IterationSemantics s);
Heuristic heuristic_from_string(const std::string& s);

struct FirstHit {
  double q = 0;                   // quality threshold
  std::uint64_t iteration = 0;    // 0 = the random start already met it
  std::int64_t time_ns = 0;       // elapsed wall time when first reached
  bool operator==(const FirstHit&) const = default;
};

// One heuristic run. Timing fields are total_time_ns and FirstHit::time_ns;
// everything else is reproducible from (instance, config, targets).
struct RunRecord {
  Heuristic heuristic = Heuristic::kTabu;
  std::string instance_name;
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;           // budget I
  std::uint64_t executed_iterations = 0;  // < I only when truncated at hit
  std::int64_t total_time_ns = 0;
  std::vector<double> targets;            // requested thresholds, descending
  std::vector<FirstHit> first_hits;       // subset of targets, descending q
  Cost final_best_cost = 0;
  std::optional<Cost> best_known;
  IterationSemantics iteration_semantics = IterationSemantics::kNeighborhoodScan;

  std::optional<FirstHit> hit_for(double q) const;
};

// Runs sharing one (heuristic, instance, budget) cell of an experiment.
struct RunSet {
  Heuristic heuristic = Heuristic::kTabu;
  std::string instance_name;
  std::uint64_t iterations = 0;
  std::vector<RunRecord> records;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::int64_t elapsed_ns() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Compiles quality targets into integer cost thresholds floor((1+Q)*C_best)
// and records the first iteration/time each one is reached. The watermark
// lets the hot loop skip the tracker entirely until the best cost crosses
// the easiest pending threshold.
class TargetTracker {
 public:
  TargetTracker(std::vector<double> targets, std::optional<Cost> best_known,
                const std::string& instance_name);

  Cost watermark() const { return watermark_; }
  bool all_hit() const { return next_ == thresholds_.size(); }
  void record_hits(Cost best, std::uint64_t iteration, std::int64_t time_ns);

  const std::vector<double>& targets() const { return targets_; }
  std::vector<FirstHit> take_hits() { return std::move(hits_); }

 private:
  std::vector<double> targets_;     // descending
  std::vector<Cost> thresholds_;    // descending, parallel to targets_
  std::size_t next_ = 0;            // first pending threshold
  Cost watermark_ = std::numeric_limits<Cost>::min();
  std::vector<FirstHit> hits_;
};

// Newline-delimited JSON run log: one header line carrying the schema
// version and the set's shared fields, then one record per line.
void persist_runs(const RunSet& set, const std::string& path,
                  bool append = false);
void persist_runs(const RunSet& set, std::ostream& out);

struct LoadResult {
  RunSet set;
  std::size_t skipped_lines = 0;  // corrupt or truncated records dropped
};
LoadResult load_runs(const std::string& path);
LoadResult load_runs(std::istream& in);

}  // namespace qap
