#pragma once

#include <span>
#include <vector>

#include "qap/instance.hpp"

namespace qap {

// Exact objective value: sum over all ordered pairs of F[i][j] * D[p(i)][p(j)].
Cost cost(const Instance& inst, std::span<const int> perm);

// Exact cost change of exchanging the locations of facilities i and j,
// computed in O(N) with the general formula: no symmetry or zero-diagonal
// assumption on either matrix.
Cost swap_delta(const Instance& inst, std::span<const int> perm, int i, int j);

// delta(i, j) holds swap_delta for every pair, valid only for the permutation
// it was built (or last updated) against.
class DeltaTable {
 public:
  DeltaTable() = default;
  explicit DeltaTable(int n) : delta_(n) {}

  int size() const { return delta_.size(); }
  Cost delta(int i, int j) const { return delta_(i, j); }
  Cost& at(int i, int j) { return delta_(i, j); }
  const Matrix& matrix() const { return delta_; }
  bool operator==(const DeltaTable&) const = default;

 private:
  Matrix delta_;
};

DeltaTable build_delta_table(const Instance& inst, std::span<const int> perm);

// Refreshes the table after the swap (r, s) has been applied to perm; `perm`
// is the post-swap permutation. Pairs not touching r or s update in O(1),
// pairs touching them are recomputed in O(N).
void update_delta_table(DeltaTable& table, const Instance& inst,
                        std::span<const int> perm, int r, int s);

// Exchanges p(i), p(j) in place and maintains the cached cost from the given
// delta value (taken from a DeltaTable or a swap_delta call).
void apply_swap(std::vector<int>& perm, Cost& cached_cost, Cost delta, int i,
                int j);

}  // namespace qap
