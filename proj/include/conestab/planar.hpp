#pragma once

#include <functional>
#include <vector>

#include "conestab/cone.hpp"
#include "conestab/region.hpp"

namespace conestab::planar {

/// A boundary-carrying curve: the line {normal . x = offset} or the ellipse
/// x = center + S (cos t, sin t) with det S > 0.
struct Curve {
  bool is_line = true;
  Vec2 normal = Vec2::Zero();
  double offset = 0.0;
  Vec2 center = Vec2::Zero();
  Mat2 S = Mat2::Identity();
  bool is_circle = false;
  double radius = 0.0;
};

/// An oriented piece of the boundary with the region on its left. Segments
/// run from `a` to `b`; arcs run over the parameter interval [t0, t1]
/// (t1 < t0 for clockwise traversal).
struct Piece {
  int curve = -1;
  bool arc = false;
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  double t0 = 0.0;
  double t1 = 0.0;
  double length = 0.0;
  bool on_cone = false;

  Vec2 point(const Curve& c, double s) const;          // s in [0, 1]
  Vec2 outward_normal(const Curve& c, double s) const;  // unit
  double speed(const Curve& c, double s) const;         // |d point / ds|
};

/// The exact boundary of a planar region built from half-planes and
/// ellipses. Throws GeometryError for unsupported leaves or unbounded sets.
struct Boundary {
  std::vector<Curve> curves;
  std::vector<Piece> pieces;
  double scale = 1.0;

  static Boundary of(const Region& region);
  /// Marks pieces lying on the cone boundary (all of their points within
  /// `rel_tol * max(1, scale)` of one facet).
  void classify(const ConvexCone& cone, double rel_tol = 1e-9);

  double area() const;
  double length(bool skip_on_cone = false) const;
  Vec2 centroid() const;
  /// Integral of f(x, outward normal) ds over the boundary.
  double integrate(const std::function<double(const Vec2&, const Vec2&)>& f, bool skip_on_cone = false) const;
};

/// True when every leaf of the region can be handled by Boundary::of.
bool supported(const Region& region);

}  // namespace conestab::planar
