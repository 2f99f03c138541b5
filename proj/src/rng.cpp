#include "conestab/rng.hpp"

#include <array>
#include <cmath>

namespace conestab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t CounterRng::next_u64() {
  return splitmix64(key_ + 0xD1B54A32D192ED03ULL * (++counter_));
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  // Box-Muller; one variate per call keeps the counter contract simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Vec CounterRng::normal_vector(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Vec CounterRng::uniform_in_box(const Vec& lo, const Vec& hi) {
  Vec v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) v[i] = uniform(lo[i], hi[i]);
  return v;
}

Vec CounterRng::unit_vector(int n) {
  for (;;) {
    Vec v = normal_vector(n);
    const double r = v.norm();
    if (r > 1e-300) return v / r;
  }
}

namespace {

constexpr std::array<int, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) : dim_(dim), shift_(dim) {
  if (dim < 1 || dim > static_cast<int>(kPrimes.size()))
    throw GeometryError("Halton sequence supports dimensions 1..16");
  CounterRng rng(seed, 0x4A17);
  for (double& s : shift_) s = rng.uniform();
}

Vec HaltonSequence::next_unit() {
  Vec u(dim_);
  for (int d = 0; d < dim_; ++d) {
    double x = radical_inverse(index_, kPrimes[d]) + shift_[d];
    u[d] = x - std::floor(x);
  }
  ++index_;
  return u;
}

Vec HaltonSequence::next_in_box(const Vec& lo, const Vec& hi) {
  return lo + (hi - lo).cwiseProduct(next_unit());
}

}  // namespace conestab
