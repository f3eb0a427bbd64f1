#include "qap/evaluation.hpp"

#include <utility>

namespace qap {

namespace {

// Bijectivity is the caller's precondition; only the dimension is checked on
// this hot path.
void check_perm(const Instance& inst, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != inst.n)
    throw ValidationError(inst.name + ": permutation size " +
                          std::to_string(perm.size()) +
                          " does not match instance size " +
                          std::to_string(inst.n));
}

void check_index(const Instance& inst, int i) {
  if (i < 0 || i >= inst.n)
    throw ValidationError(inst.name + ": facility index " + std::to_string(i) +
                          " out of range");
}

}  // namespace

Cost cost(const Instance& inst, std::span<const int> perm) {
  check_perm(inst, perm);
  Cost total = 0;
  for (int i = 0; i < inst.n; ++i) {
    const Cost* flow_row = inst.flow.row(i);
    const Cost* dist_row = inst.dist.row(perm[i]);
    for (int j = 0; j < inst.n; ++j) total += flow_row[j] * dist_row[perm[j]];
  }
  return total;
}

namespace {

// General asymmetric swap delta for facilities r and s; the cross and
// diagonal terms are split out of the k-loop.
Cost swap_delta_impl(const Instance& inst, std::span<const int> p, int r,
                     int s) {
  const Matrix& f = inst.flow;
  const Matrix& d = inst.dist;
  const int pr = p[r];
  const int ps = p[s];
  Cost acc = (f(r, r) - f(s, s)) * (d(ps, ps) - d(pr, pr)) +
             (f(r, s) - f(s, r)) * (d(ps, pr) - d(pr, ps));
  for (int k = 0; k < inst.n; ++k) {
    if (k == r || k == s) continue;
    const int pk = p[k];
    acc += (f(k, r) - f(k, s)) * (d(pk, ps) - d(pk, pr)) +
           (f(r, k) - f(s, k)) * (d(ps, pk) - d(pr, pk));
  }
  return acc;
}

}  // namespace

Cost swap_delta(const Instance& inst, std::span<const int> perm, int i,
                int j) {
  check_perm(inst, perm);
  check_index(inst, i);
  check_index(inst, j);
  if (i == j) return 0;
  return swap_delta_impl(inst, perm, i, j);
}

DeltaTable build_delta_table(const Instance& inst, std::span<const int> perm) {
  check_perm(inst, perm);
  DeltaTable table(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    for (int j = i + 1; j < inst.n; ++j) {
      const Cost d = swap_delta_impl(inst, perm, i, j);
      table.at(i, j) = d;
      table.at(j, i) = d;
    }
  }
  return table;
}

void update_delta_table(DeltaTable& table, const Instance& inst,
                        std::span<const int> perm, int r, int s) {
  check_perm(inst, perm);
  check_index(inst, r);
  check_index(inst, s);
  if (table.size() != inst.n)
    throw ValidationError(inst.name + ": delta table size mismatch");
  if (r == s) return;
  const Matrix& f = inst.flow;
  const Matrix& d = inst.dist;
  // perm is the post-swap permutation, so perm[r] is the location facility s
  // just left and vice versa.
  const int pr = perm[r];
  const int ps = perm[s];
  for (int u = 0; u < inst.n; ++u) {
    if (u == r || u == s) continue;
    const int pu = perm[u];
    for (int v = u + 1; v < inst.n; ++v) {
      if (v == r || v == s) continue;
      const int pv = perm[v];
      const Cost adj = (f(r, u) - f(r, v) + f(s, v) - f(s, u)) *
                           (d(pr, pv) - d(pr, pu) + d(ps, pu) - d(ps, pv)) +
                       (f(u, r) - f(v, r) + f(v, s) - f(u, s)) *
                           (d(pv, pr) - d(pu, pr) + d(pu, ps) - d(pv, ps));
      const Cost next = table.delta(u, v) + adj;
      table.at(u, v) = next;
      table.at(v, u) = next;
    }
  }
  for (int k = 0; k < inst.n; ++k) {
    if (k == r) continue;
    const Cost dr = swap_delta_impl(inst, perm, r, k);
    table.at(r, k) = dr;
    table.at(k, r) = dr;
  }
  for (int k = 0; k < inst.n; ++k) {
    if (k == s || k == r) continue;
    const Cost ds = swap_delta_impl(inst, perm, s, k);
    table.at(s, k) = ds;
    table.at(k, s) = ds;
  }
  table.at(r, r) = 0;
  table.at(s, s) = 0;
}

void apply_swap(std::vector<int>& perm, Cost& cached_cost, Cost delta, int i,
                int j) {
  if (i < 0 || j < 0 || i >= static_cast<int>(perm.size()) ||
      j >= static_cast<int>(perm.size()))
    throw ValidationError("apply_swap: index out of range");
  std::swap(perm[i], perm[j]);
  cached_cost += delta;
}

}  // namespace qap
