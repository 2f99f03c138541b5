#pragma once

#include <optional>
#include <vector>

#include "conestab/core.hpp"

namespace conestab {

/// Certified bracket lower <= value <= upper.
struct SupportBracket {
  double lower = 0.0;
  double upper = 0.0;
  double mid() const { return 0.5 * (lower + upper); }
  double gap() const { return upper - lower; }
};

/// An open convex cone C = R^k x C~ with apex at the origin.
///
/// Polyhedral cones are given by unit inward normals (C = {x : n_i . x > 0}).
/// Circular cones {x : a . x > cos(phi) |x|} are kept in closed form. At
/// construction the cone computes its lineality space and an orthonormal
/// `frame()` whose first k rows span the lineality space and whose last row is
/// an axis direction a with a . u > 0 for every nonzero u in the closure of
/// C~. In frame coordinates the boundary of C~ meets {x_n = 0} only at 0.
class ConvexCone {
 public:
  enum class Kind { Polyhedral, Circular };

  /// Rows of `normals` are inward normals (normalized internally). `axis`
  /// overrides the default normal-form axis (the normalized sum of normals).
  static ConvexCone polyhedral(const Mat& normals, std::optional<Vec> axis = std::nullopt);
  /// Requires 0 < half_angle < pi/2. In R^2 this becomes a polyhedral wedge.
  static ConvexCone circular(const Vec& axis, double half_angle);
  static ConvexCone whole_space(int n);
  static ConvexCone orthant(int n);
  static ConvexCone half_space(const Vec& normal);
  /// Planar cone of the given opening in (0, pi], symmetric about e_2.
  static ConvexCone planar(double opening);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  int lineality_dim() const { return lineality_; }
  /// Unit inward normals, one per row (empty for circular cones).
  const Mat& normals() const { return normals_; }
  const Vec& axis() const { return axis_; }
  double half_angle() const { return half_angle_; }
  bool has_user_axis() const { return user_axis_; }
  const Mat& frame() const { return frame_; }

  Vec to_frame(const Vec& x) const { return frame_ * x; }
  Vec from_frame(const Vec& u) const { return frame_.transpose() * u; }

  /// Membership in the open cone.
  bool contains(const Vec& x) const;
  /// Membership in the closure, with slack `tol`.
  bool contains_closure(const Vec& x, double tol) const;
  /// True when x lies on the boundary of C within `tol`.
  bool on_boundary(const Vec& x, double tol) const;
  /// Index of a facet (polyhedral) containing every point within `tol`, or -1.
  /// Circular cones report 0 when all points lie on the conical surface.
  int common_facet(const std::vector<Vec>& pts, double tol) const;

  /// Euclidean projection onto the closed cone.
  Vec project(const Vec& y) const;
  /// sup{nu . z : z in B_1 n C} = |project(nu)|, with a certificate.
  SupportBracket unit_support(const Vec& nu) const;

  /// Unit extreme rays of the pointed factor, in world coordinates.
  std::vector<Vec> extreme_rays() const;
  /// Inward normals of the pointed factor C~ in its own n-k coordinates.
  Mat pointed_normals() const;

  /// H^{n-1}(S^{n-1} n C), which equals n |B_1 n C|.
  const Estimate& solid_angle() const { return solid_angle_; }
  /// |K| = |B_1 n C|.
  Estimate unit_sector_volume() const { return (1.0 / dim_) * solid_angle_; }

 private:
  ConvexCone() = default;
  void build_frame(std::optional<Vec> axis);
  void compute_solid_angle();

  Kind kind_ = Kind::Polyhedral;
  int dim_ = 0;
  int lineality_ = 0;
  Mat normals_;
  Vec axis_;
  double half_angle_ = 0.0;
  bool user_axis_ = false;
  Mat frame_;
  Estimate solid_angle_;
};

}  // namespace conestab
