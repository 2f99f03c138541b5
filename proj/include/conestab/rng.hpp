#pragma once

#include <cstdint>
#include <vector>

#include "conestab/core.hpp"

namespace conestab {

/// Counter-based generator: draw i of stream s under seed k is a pure function
/// of (k, s, i), so any sub-stream can be regenerated independently.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Vec normal_vector(int n);
  Vec uniform_in_box(const Vec& lo, const Vec& hi);
  /// Uniform on the unit sphere S^{n-1}.
  Vec unit_vector(int n);
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Halton points with a seeded Cranley-Patterson rotation, used wherever a
/// low-discrepancy fill of a box is preferable to i.i.d. draws.
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed);
  Vec next_unit();
  Vec next_in_box(const Vec& lo, const Vec& hi);

 private:
  int dim_;
  std::uint64_t index_ = 1;
  std::vector<double> shift_;
};

}  // namespace conestab
