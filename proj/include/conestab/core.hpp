#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace conestab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;

/// Geometric precondition failures: bad cones, bodies that do not contain the
/// origin, regions outside their cone, and the like.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that could not reach its stated accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical value together with its standard error. `exact` marks values
/// obtained from closed forms or deterministic quadrature; for those
/// `std_error` carries the quadrature error bound (usually 0).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;

  static Estimate closed(double v) { return {v, 0.0, true}; }
  static Estimate sampled(double v, double se) { return {v, se, false}; }
};

inline Estimate operator+(const Estimate& a, const Estimate& b) {
  return {a.value + b.value, std::hypot(a.std_error, b.std_error), a.exact && b.exact};
}
inline Estimate operator-(const Estimate& a, const Estimate& b) {
  return {a.value - b.value, std::hypot(a.std_error, b.std_error), a.exact && b.exact};
}
inline Estimate operator*(double s, const Estimate& a) {
  return {s * a.value, std::abs(s) * a.std_error, a.exact};
}

/// Surface measure of the unit sphere S^{n-1}.
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Lebesgue measure of the unit ball B_1 in R^n.
inline double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

/// Lexicographic comparison of two points of equal dimension.
inline bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace conestab
