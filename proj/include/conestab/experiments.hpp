#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conestab/deficit.hpp"

namespace conestab {

/// Half ball of the given radius whose flat side lies on the edge of a pointed
/// 2D cone with the larger first coordinate, centred `distance` from the apex.
Region edge_half_ball(const ConvexCone& cone, double distance = 10.0, double radius = 1.0);

/// pi / (2 sqrt(theta/2) sqrt(pi/2)) - 1.
double theta_closed_form_mu(double theta);

struct RandomPolytopeOptions {
  int min_facets = 5;
  int max_facets = 10;
  double min_radius = 0.25;
  double max_radius = 0.6;
};

/// Intersection of random half spaces around a random point of the cone,
/// clipped to the cone. Deterministic in (cone, seed).
Region random_polytope(const ConvexCone& cone, std::uint64_t seed, const RandomPolytopeOptions& options = {});

/// The ellipsoid (I + eps G) B_1 clipped to the cone, G symmetric with
/// entries in [-1, 1].
Region perturbed_sector(const ConvexCone& cone, std::uint64_t seed, double eps = 0.2);

struct FamilyMember {
  double parameter = 0.0;
  Estimate mu;
  double mu_closed = 0.0;       // NaN when no closed form applies
  Estimate delta_K;
  double asymmetry = 0.0;
  double constrained_asymmetry = 0.0;
  double stability_ratio = 0.0;  // NaN when mu <= 1e-12
  double identity_residual = 0.0;
};

struct ExponentFit {
  double slope = 0.0;  // 1 / beta
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int points = 0;
  double beta() const { return 1.0 / slope; }
};

struct FamilyResult {
  std::string name;
  std::string cone;
  std::uint64_t seed = kDefaultSeed;
  long samples = 0;
  std::vector<FamilyMember> members;  // sorted by parameter
  std::optional<ExponentFit> fit;
};

struct FitOptions {
  double mu_low = 1e-10;
  double mu_high = 1e-1;
  int resamples = 200;
  double level = 0.9;
  std::uint64_t seed = kDefaultSeed;
};

/// Least-squares slope of log A against log mu over the members with mu in
/// (mu_low, mu_high), with a percentile bootstrap interval. Throws
/// GeometryError with fewer than five usable points.
ExponentFit exponent_fit(const std::vector<double>& mu, const std::vector<double>& asymmetry,
                         const FitOptions& options = {});
ExponentFit exponent_fit(const FamilyResult& family, const FitOptions& options = {});

struct ExperimentOptions {
  DeficitOptions deficit;
  double distance = 10.0;
  double tolerance = 1e-6;  // agreement required of closed forms
};

/// Half balls on the edge of C_theta. Throws GeometryError for theta outside
/// (0, pi) and NumericalError when mu misses its closed form.
FamilyResult theta_cone_family(const std::vector<double>& thetas, const ExperimentOptions& options = {});

/// Ellipsoids with axes (1 + 1/h, 1 / (1 + 1/h), 1, ...) against their orthant
/// pieces. identity_residual is the largest miss among the scaling identities
/// and mu(E~_h) = delta_B1(E_h).
FamilyResult ellipsoid_family(const std::vector<int>& hs, const ConvexCone& cone,
                              const ExperimentOptions& options = {});

struct ConstantEstimate {
  double estimate = 0.0;
  std::vector<double> ratios;   // one per trial; NaN where the region was an equality case
  std::vector<std::string> kinds;
  std::vector<double> mus;
  std::vector<double> asymmetries;  // constrained; NaN for equality cases
  int argmax = -1;
};

/// Max of the stability ratio over random polytopes, perturbed sectors and,
/// for pointed 2D cones, the edge half ball.
ConstantEstimate constant_estimator(const ConvexCone& cone, int trials, std::uint64_t seed,
                                    const ExperimentOptions& options = {});

struct ThetaConstant {
  double theta = 0.0;
  double estimate = 0.0;
};

/// constant_estimator on C_theta for each theta.
std::vector<ThetaConstant> theta_constant_growth(const std::vector<double>& thetas, int trials, std::uint64_t seed,
                                                 const ExperimentOptions& options = {});

struct TranslationRow {
  Vec direction;
  double t = 0.0;  // |y|
  double f = 0.0;  // |(y + A) delta A|
  double ratio = 0.0;
};

struct TranslationScan {
  std::vector<TranslationRow> rows;
  double sup = 0.0;
  int argsup = -1;
};

/// f(t d) / t over the given unit directions and lengths.
TranslationScan translation_upper_scan(const Region& A, const std::vector<Vec>& directions, const std::vector<double>& ts,
                               const MeasureOptions& options = {});

struct LowerBoundScan {
  double c = 0.0;  // min f over s <= |y| <= diam
  double C = 0.0;  // min f / |y| over |y| <= s
  double s = 0.0;
  double diam = 0.0;
  std::vector<TranslationRow> rows;
  int violations = 0;  // grid points with f < min(c, C |y|)
};

/// Brute force over `directions` x `radii` grid points with |y| up to diam(A)
/// and s = diam / 4. Throws GeometryError for regions of zero volume.
LowerBoundScan translation_lower_scan(const Region& A, int directions = 64, int radii = 64,
                              const MeasureOptions& options = {});

/// Evenly spread unit directions: a circle in 2D, a Fibonacci sphere in 3D and
/// seeded random directions otherwise.
std::vector<Vec> scan_directions(int dim, int count, std::uint64_t seed = kDefaultSeed);

struct WedgeRow {
  Vec y;
  bool upward = true;  // first identity checked when true, second otherwise
  long samples = 0;
  long witnesses = 0;
  Estimate measure;    // volume of the left side
  std::optional<Vec> witness;
};

struct WedgeReport {
  double b_tilde = 0.0;
  std::vector<WedgeRow> rows;
  long total_witnesses() const;
};

/// Monte Carlo membership check of
///   K~ \ (y + K~) = K~ \ (y + C)      for y_n >= 0,
///   (y + K~) \ K~ = (y + K~) \ C      for y_n < 0,
/// with y given in world coordinates. Throws GeometryError "lemma hypothesis
/// violated" when y has a component along the lineality space.
WedgeReport wedge_identity_check(const ConvexCone& cone, const std::vector<Vec>& ys, long samples,
                                 std::uint64_t seed);

}  // namespace conestab
