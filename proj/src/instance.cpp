#include "qap/instance.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qap/evaluation.hpp"

namespace qap {

bool is_permutation(std::span<const int> perm, int n) {
  if (static_cast<int>(perm.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

namespace {

Cost read_integer(std::istream& in, const std::string& name,
                  const char* what) {
  Cost v;
  if (!(in >> v)) {
    std::string token;
    in.clear();
    if (in >> token) {
      throw ParseError(name + ": non-integer token '" + token + "' while reading " + what);
    }
    throw ParseError(name + ": unexpected end of input while reading " + std::string(what));
  }
  return v;
}

void read_matrix(std::istream& in, Matrix& m, const std::string& name,
                 const char* what) {
  const int n = m.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = read_integer(in, name, what);
}

}  // namespace

Instance parse_instance(std::istream& in, const std::string& name) {
  Instance inst;
  inst.name = name;
  const Cost n = read_integer(in, name, "problem size");
  if (n < 1) throw ParseError(name + ": problem size must be >= 1");
  if (n > 10000) throw ParseError(name + ": implausible problem size");
  inst.n = static_cast<int>(n);
  inst.flow = Matrix(inst.n);
  inst.dist = Matrix(inst.n);
  read_matrix(in, inst.flow, name, "flow matrix");
  read_matrix(in, inst.dist, name, "distance matrix");
  Cost extra;
  if (in >> extra) throw ParseError(name + ": trailing data after both matrices");
  inst.best_known = best_known(name);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file: " + path);
  return parse_instance(in, std::filesystem::path(path).stem().string());
}

void serialize_instance(const Instance& inst, std::ostream& out) {
  out << inst.n << "\n\n";
  for (const Matrix* m : {&inst.flow, &inst.dist}) {
    for (int i = 0; i < inst.n; ++i) {
      for (int j = 0; j < inst.n; ++j) out << (j ? " " : "") << (*m)(i, j);
      out << "\n";
    }
    out << "\n";
  }
}

std::optional<Cost> best_known(const std::string& name) {
  static constexpr std::array<std::pair<const char*, Cost>, 6> kRegistry{{
      {"nug30", 6124},
      {"lipa90a", 360630},
      {"sko100a", 152002},
      {"tai100a", 21052466},
      {"tho150", 8133398},
      {"dre110", 2052},
  }};
  for (const auto& [known, value] : kRegistry)
    if (name == known) return value;
  return std::nullopt;
}

void write_solution(const Instance& inst, const Assignment& a,
                    std::ostream& out) {
  if (!is_permutation(a.perm, inst.n))
    throw ValidationError(inst.name + ": assignment is not a permutation");
  const Cost recomputed = cost(inst, a.perm);
  if (recomputed != a.cost)
    throw ValidationError(inst.name + ": cached cost " + std::to_string(a.cost) +
                          " differs from recomputed " + std::to_string(recomputed));
  out << inst.n << " " << a.cost << "\n";
  for (int i = 0; i < inst.n; ++i) out << (i ? " " : "") << a.perm[i] + 1;
  out << "\n";
}

Assignment read_solution(const Instance& inst, std::istream& in) {
  Assignment a;
  const Cost n = read_integer(in, inst.name, "solution size");
  if (n != inst.n)
    throw ValidationError(inst.name + ": solution size " + std::to_string(n) +
                          " does not match instance size " + std::to_string(inst.n));
  a.cost = read_integer(in, inst.name, "solution cost");
  a.perm.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const Cost loc = read_integer(in, inst.name, "permutation entry");
    a.perm[i] = static_cast<int>(loc) - 1;  // file is 1-based
  }
  if (!is_permutation(a.perm, inst.n))
    throw ValidationError(inst.name + ": solution permutation is not a bijection");
  const Cost recomputed = cost(inst, a.perm);
  if (recomputed != a.cost)
    throw ValidationError(inst.name + ": stated cost " + std::to_string(a.cost) +
                          " differs from recomputed " + std::to_string(recomputed));
  return a;
}

}  // namespace qap
