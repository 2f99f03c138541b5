#pragma once

#include <vector>

#include "conestab/core.hpp"

namespace conestab {

/// Vertices of the bounded polytope {A x <= b} by combinatorial enumeration
/// of n-subsets of constraints. Suitable for the small systems used here.
std::vector<Vec> polytope_vertices(const Mat& A, const Vec& b, double tol = 1e-10);

/// A 2-face of a 3D polytope with its outward normal and vertices ordered
/// counter-clockwise when seen from outside.
struct Facet3 {
  Eigen::Vector3d normal;
  std::vector<Eigen::Vector3d> vertices;
  double area = 0.0;
  int constraint = -1;
};

std::vector<Facet3> polytope_facets_3d(const Mat& A, const Vec& b, double tol = 1e-10);

/// Exact volume of a bounded 3D polytope from its facets.
double polytope_volume_3d(const std::vector<Facet3>& facets);

/// max dir . u over {|u| <= 1, A u <= b} by enumerating KKT active sets;
/// returns -infinity when the set is empty.
double ball_halfspace_support(const Vec& dir, const Mat& A, const Vec& b, Vec* argmax = nullptr);

/// True when {A x <= b} has a trivial recession cone.
bool polyhedron_is_bounded(const Mat& A);

}  // namespace conestab
