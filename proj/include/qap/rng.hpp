#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qap {

// Finalizer-style mixer; bijective on 64-bit values.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Splittable counter scheme: for a fixed base the map index -> seed is a
// composition of an injection and a bijection, so distinct run indices can
// never collide.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) + index);
}

// Deterministic draws on top of std::mt19937_64. The standard distribution
// classes are implementation-defined, so the few draw kinds needed here are
// spelled out explicitly; identical seeds give identical streams on any
// conforming standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on {0, ..., bound-1} by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform on {lo, ..., hi}, inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace qap
