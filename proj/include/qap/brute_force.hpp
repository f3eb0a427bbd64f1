#pragma once

#include <cstdint>
#include <span>

#include "qap/instance.hpp"

namespace qap {

struct OracleResult {
  Assignment best;               // lexicographically smallest optimal perm
  std::uint64_t optimum_count;   // number of distinct optimal permutations
};

// Straight-sum evaluator kept independent of the evaluation module: it runs
// over locations and the inverse permutation, so the two cost paths
// cross-validate each other in tests.
Cost naive_cost(const Instance& inst, std::span<const int> perm);

// Exhaustive search over all N! permutations. Refuses instances larger than
// max_n (the default keeps runtime to roughly a second).
OracleResult brute_force(const Instance& inst, int max_n = 10);

}  // namespace qap
