#pragma once

#include <memory>
#include <optional>

#include "conestab/cone.hpp"
#include "conestab/region.hpp"

namespace conestab {

/// A bounded convex body used as a gauge or as the sector K.
///
/// SphericalSector is (B_r n C) + center. Polytope is {A x <= b}.
/// ClippedSector is ((B_r n C) n {A u <= b}) + center, with u = x - center.
class SectorBody {
 public:
  enum class Kind { SphericalSector, Polytope, ClippedSector };

  static SectorBody sector(const ConvexCone& cone, double radius = 1.0,
                           std::optional<Vec> center = std::nullopt);
  static SectorBody polytope(const Mat& A, const Vec& b);
  static SectorBody clipped_sector(const ConvexCone& cone, double radius, const Vec& center,
                                   const Mat& A, const Vec& b);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const ConvexCone& cone() const;
  bool has_cone() const { return cone_ != nullptr; }
  double radius() const { return radius_; }
  const Vec& center() const { return center_; }
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }

  bool contains(const Vec& x) const { return piece_.contains(x); }
  Box bounding_box() const { return piece_.bounding_box(); }
  const ConvexPiece& piece() const { return piece_; }
  Region to_region() const;

  SectorBody translated(const Vec& t) const;
  /// Dilation about the origin.
  SectorBody scaled(double lambda) const;

  /// sup{nu . z : z in body} with a certified bracket.
  SupportBracket support(const Vec& nu) const;
  Estimate volume() const;

 private:
  SectorBody() = default;
  void rebuild_piece();

  Kind kind_ = Kind::Polytope;
  int dim_ = 0;
  std::shared_ptr<const ConvexCone> cone_;
  double radius_ = 1.0;
  Vec center_;
  Mat A_;
  Vec b_;
  std::vector<Vec> vertices_;
  ConvexPiece piece_;
};

/// ||nu||_{body*} for a unit direction; returns the bracket midpoint.
double support_value(const SectorBody& body, const Vec& direction);

/// inf{lambda > 0 : z / lambda in body}. Requires 0 in the interior.
double minkowski_gauge(const SectorBody& body, const Vec& z);
/// Gauge of an arbitrary convex piece whose interior holds the origin.
double minkowski_gauge(const ConvexPiece& piece, const Vec& z);

struct GaugeBounds {
  double m = 0.0;  // min of the support function over unit directions
  double M = 0.0;  // max of the support function over unit directions
  Vec argmin;
  Vec argmax;
  double ratio() const { return M / m; }
};

struct GaugeOptions {
  int grid = 0;  // 0 picks a dimension-dependent default
  double tol = 1e-10;
};

GaugeBounds gauge_bounds(const SectorBody& body, const GaugeOptions& options = {});

struct Recentring {
  Vec x0;
  double ratio = 0.0;
  double refined_best = 0.0;
  bool certified = false;
};

struct RecentringOptions {
  int grid = 0;    // points per axis and level (odd); 0 picks a default
  int levels = 0;  // 0 picks a default
};

/// Nested-grid search for x0 in -K minimising M/m of K + x0.
Recentring optimal_recentring(const SectorBody& K, const RecentringOptions& options = {});

/// Half the least height x_n over unit rays of the closed pointed factor.
double boundary_height_constant(const ConvexCone& cone);
/// The same constant for a cone given directly as the pointed factor: inward
/// normals and the height direction, both in the same coordinates.
double pointed_height_constant(const Mat& normals, const Vec& height_axis);

struct ReducedWedge {
  double b = 0.0;
  double gamma = 0.0;
  int M = 0;
  double b_tilde = 0.0;
  ConvexPiece piece;  // B_1/2 n C n {|x_i| < b~, i < k} n {x_n < b~} in world coordinates
  bool contains(const Vec& x) const { return piece.contains(x); }
};

ReducedWedge reduced_wedge(const ConvexCone& cone);

struct ProjectionSplit {
  Vec yc;  // projection onto the closed pointed factor
  Vec yp;  // y - yc
};

/// Splits y outside the open pointed factor. Coordinates are world
/// coordinates when k = 0, otherwise the pointed-factor frame coordinates.
ProjectionSplit cone_projection_split(const Vec& y, const ConvexCone& cone);

}  // namespace conestab
