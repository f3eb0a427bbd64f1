#include "qap/brute_force.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace qap {

Cost naive_cost(const Instance& inst, std::span<const int> perm) {
  if (!is_permutation(perm, inst.n))
    throw ValidationError(inst.name + ": permutation invalid for size " +
                          std::to_string(inst.n));
  std::vector<int> facility_at(inst.n);
  for (int i = 0; i < inst.n; ++i) facility_at[perm[i]] = i;
  Cost total = 0;
  for (int la = 0; la < inst.n; ++la)
    for (int lb = 0; lb < inst.n; ++lb)
      total += inst.flow(facility_at[la], facility_at[lb]) * inst.dist(la, lb);
  return total;
}

OracleResult brute_force(const Instance& inst, int max_n) {
  if (inst.n > max_n)
    throw ValidationError(inst.name + ": size " + std::to_string(inst.n) +
                          " exceeds brute-force cap " + std::to_string(max_n));
  std::vector<int> perm(inst.n);
  std::iota(perm.begin(), perm.end(), 0);
  OracleResult result;
  result.best.cost = std::numeric_limits<Cost>::max();
  result.optimum_count = 0;
  // next_permutation enumerates in lexicographic order, so the first
  // permutation achieving the minimum is the lexicographically smallest one.
  do {
    const Cost c = naive_cost(inst, perm);
    if (c < result.best.cost) {
      result.best.cost = c;
      result.best.perm = perm;
      result.optimum_count = 1;
    } else if (c == result.best.cost) {
      ++result.optimum_count;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return result;
}

}  // namespace qap
