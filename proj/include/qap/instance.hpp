#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qap {

using Cost = std::int64_t;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed input text (instance or solution files).
struct ParseError : Error {
  using Error::Error;
};
// A contract violation on otherwise well-formed data (bad permutation,
// dimension mismatch, stated cost disagreeing with the recomputed one, ...).
struct ValidationError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// Square row-major integer matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n, Cost fill = 0)
      : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}

  int size() const { return n_; }
  Cost& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }
  Cost operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }
  const Cost* row(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * n_;
  }
  bool operator==(const Matrix&) const = default;

 private:
  int n_ = 0;
  std::vector<Cost> data_;
};

struct Instance {
  std::string name;
  int n = 0;
  Matrix flow;  // F[i][j]: flow between facilities i and j
  Matrix dist;  // D[a][b]: distance between locations a and b
  std::optional<Cost> best_known;
};

// perm[facility] = location; cost is the cached objective value.
struct Assignment {
  std::vector<int> perm;
  Cost cost = 0;
};

bool is_permutation(std::span<const int> perm, int n);

// Reads "N followed by two N x N matrices" with arbitrary whitespace.
// The first matrix is taken as flow, the second as distance; best_known is
// filled from the registry when the name is known.
Instance parse_instance(std::istream& in, const std::string& name);
Instance load_instance(const std::string& path);
void serialize_instance(const Instance& inst, std::ostream& out);

// Best-known objective values for the benchmark instances used here.
std::optional<Cost> best_known(const std::string& name);

// Solution files: "N cost" on the first line, then the permutation with
// 1-based location indices.
void write_solution(const Instance& inst, const Assignment& a,
                    std::ostream& out);
Assignment read_solution(const Instance& inst, std::istream& in);

}  // namespace qap
