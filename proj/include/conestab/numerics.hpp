#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "conestab/core.hpp"

namespace conestab {

/// Lawson-Hanson active-set solver for min |A x - b| subject to x >= 0.
Vec nnls(const Mat& A, const Vec& b, int max_iterations = 0);

/// Least-distance program: the minimum-norm x with G x >= h, or nullopt when
/// the constraints are infeasible.
std::optional<Vec> least_distance(const Mat& G, const Vec& h);

/// Adaptive Gauss-Kronrod (7/15) quadrature.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-13, double rel_tol = 1e-13, int max_depth = 40);

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with `n` points.
QuadratureRule gauss_legendre(int n);

/// Golden-section search for a minimum of a unimodal function on [a, b].
double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10);

struct SimplexResult {
  Vec argmin;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex search from `start` with initial edge `step`. Stops
/// once the simplex diameter drops below `diameter_tol`.
SimplexResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& start,
                          double step, double diameter_tol = 1e-6, int max_evaluations = 4000);

}  // namespace conestab
