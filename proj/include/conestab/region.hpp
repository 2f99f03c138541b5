#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conestab/cone.hpp"
#include "conestab/core.hpp"

namespace conestab {

/// Axis-aligned box; components may be infinite for unbounded sets.
struct Box {
  Vec lo;
  Vec hi;

  static Box empty(int n);
  static Box infinite(int n);
  bool finite() const { return lo.allFinite() && hi.allFinite(); }
  bool is_empty() const { return (hi.array() < lo.array()).any(); }
  double diagonal() const { return (hi - lo).norm(); }
  double volume() const { return (hi - lo).prod(); }
  Box hull(const Box& o) const;
  Box meet(const Box& o) const;
};

/// {x : |inverse (x - center)| <= 1}, i.e. x = center + shape * u with |u| <= 1.
struct Ellipsoid {
  Vec center;
  Mat shape;
  Mat inverse;

  static Ellipsoid make(Vec center, Mat shape);
  static Ellipsoid ball(Vec center, double radius) {
    const Eigen::Index n = center.size();
    return make(std::move(center), radius * Mat::Identity(n, n));
  }
  bool is_ball(double* radius = nullptr) const;
};

/// {x : g . (x - apex) >= |G (x - apex)|}; circular cones are the case
/// g = tan(phi) a, G = I - a a^T.
struct SecondOrderCone {
  Vec apex;
  Vec g;
  Mat G;
};

/// Marks a piece that is exactly (B_radius n C) + center, so closed forms apply.
struct SectorTag {
  std::shared_ptr<const ConvexCone> cone;
  double radius = 1.0;
  Vec center;
};

/// A convex set {A x <= b} n (ellipsoid) n (second-order cone). Rows of A are
/// unit vectors.
struct ConvexPiece {
  Mat A;
  Vec b;
  std::optional<Ellipsoid> ellipsoid;
  std::optional<SecondOrderCone> soc;
  std::optional<SectorTag> sector;

  int dim() const { return static_cast<int>(A.cols()); }
  bool contains(const Vec& x) const;
  /// Smallest constraint slack at x (positive inside).
  double margin(const Vec& x) const;
  bool is_polytope() const { return !ellipsoid && !soc; }
  ConvexPiece affine(const Mat& L, const Vec& t) const;
  Box bounding_box() const;
};

/// A measurable subset of R^n built from convex pieces by union, intersection
/// and difference. Values are immutable and cheap to copy.
class Region {
 public:
  enum class Op { Leaf, Union, Intersection, Difference };
  static constexpr int kMaxDepth = 8;

  explicit Region(ConvexPiece piece, std::string kind = "piece");

  static Region polytope(const Mat& A, const Vec& b);
  /// Axis-aligned box [lo, hi].
  static Region box(const Vec& lo, const Vec& hi);
  static Region ball(const Vec& center, double radius);
  static Region ellipsoid(const Vec& center, const Mat& shape);
  /// Ball of radius r about c cut by the half-space {inward . (x - c) >= 0}.
  static Region half_ball(const Vec& center, double radius, const Vec& inward);
  /// (B_radius n C) + center.
  static Region spherical_sector(const ConvexCone& cone, double radius, const Vec& center);
  /// An ellipsoid intersected with the cone (apex at the origin).
  static Region ellipsoid_sector(const ConvexCone& cone, const Vec& center, const Mat& shape);

  static Region unite(const Region& a, const Region& b);
  static Region intersect(const Region& a, const Region& b);
  static Region subtract(const Region& a, const Region& b);

  /// The image {L x + t : x in this}; L must be invertible.
  Region affine(const Mat& L, const Vec& t) const;
  Region translated(const Vec& t) const;
  /// Dilation about the origin by lambda > 0.
  Region scaled(double lambda) const;
  /// Intersection with the closed cone, folded into each leaf when possible.
  Region clipped_to(const ConvexCone& cone) const;

  int dim() const;
  Op op() const;
  int depth() const;
  const std::string& kind() const;
  bool contains(const Vec& x) const;
  Box bounding_box() const;

  /// Leaf pieces in evaluation order.
  const std::vector<ConvexPiece>& leaves() const;
  bool is_single_piece() const { return op() == Op::Leaf; }
  const ConvexPiece& piece() const;
  /// Children of a boolean node.
  std::vector<Region> children() const;

 private:
  struct Node;
  explicit Region(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Halfspace rows for the closed cone shifted to `apex` (polyhedral cones) or
/// the matching second-order constraint (circular cones).
void append_cone_constraints(ConvexPiece& piece, const ConvexCone& cone, const Vec& apex);

}  // namespace conestab
