#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "conestab/cone.hpp"
#include "conestab/region.hpp"

namespace conestab {

inline constexpr std::uint64_t kDefaultSeed = 1729;

struct MeasureOptions {
  std::uint64_t seed = kDefaultSeed;
  long interior_samples = 1'000'000;
  long boundary_samples = 100'000;
};

/// |E|. Exact for planar regions, 3D polytopes and boolean trees of them, and
/// sector pieces; Monte Carlo otherwise.
Estimate volume(const Region& region, const MeasureOptions& options = {});

/// H^{n-1}(boundary of E inside the open cone).
Estimate relative_perimeter(const Region& region, const ConvexCone& cone, const MeasureOptions& options = {});

/// H^{n-1}(boundary of E).
Estimate boundary_measure(const Region& region, const ConvexCone& cone, const MeasureOptions& options = {});

Estimate intersection_volume(const Region& a, const Region& b, const MeasureOptions& options = {});
Estimate symmetric_difference_volume(const Region& a, const Region& b, const MeasureOptions& options = {});

/// Barycentre of E (Monte Carlo outside the exact planar case).
Vec centroid(const Region& region, const MeasureOptions& options = {});

struct InteriorSample {
  std::vector<Vec> points;
  double acceptance = 0.0;
};

/// Uniform points of E by rejection from its bounding box. With
/// `low_discrepancy` the candidates come from a scrambled Halton sequence.
InteriorSample sample_interior(const Region& region, long count, std::uint64_t seed, bool low_discrepancy = false);

/// Weighted boundary points. Points in the same group share a sampling
/// stream; `draws` is the number of candidates that group consumed, so the
/// weights of a group are an unbiased estimate of its surface measure.
struct SurfaceSample {
  std::vector<Vec> points;
  std::vector<Vec> normals;
  std::vector<double> weights;
  std::vector<bool> on_cone;
  std::vector<int> group;
  std::vector<long> draws;
  /// False when some group was estimated by Monte Carlo rather than exact facets.
  bool exact = true;

  std::size_t size() const { return points.size(); }
  double total_weight(bool on_cone_part) const;
  /// Sum of w f over the points passing `keep`, with its standard error.
  Estimate sum(const std::function<double(std::size_t)>& f, const std::function<bool(std::size_t)>& keep) const;
};

SurfaceSample sample_boundary(const Region& region, const ConvexCone& cone, long count, std::uint64_t seed);

/// Integral of f(x, outward normal) over the boundary, optionally skipping the
/// part on the cone boundary. Exact quadrature for planar regions.
Estimate boundary_integral(const Region& region, const ConvexCone& cone,
                           const std::function<double(const Vec&, const Vec&)>& f, bool skip_on_cone,
                           const MeasureOptions& options = {});

/// Throws GeometryError when sampled points of E leave the closed cone.
void validate_in_cone(const Region& region, const ConvexCone& cone, long samples = 4000,
                      std::uint64_t seed = kDefaultSeed);

}  // namespace conestab
