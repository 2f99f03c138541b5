#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "conestab/assignment.hpp"
#include "conestab/body.hpp"
#include "conestab/deficit.hpp"

namespace conestab {

struct TransportOptions {
  /// K0 = K + x0; the transport form of the trace integral measures |T - x0|.
  Vec x0;
  /// Forces the entropic solver even at small counts.
  bool entropic = false;
  EntropicOptions entropic_options;
};

/// Paired uniform samples of lambda E (source) and K0 (target), where lambda
/// rescales E to the volume of K0.
struct TransportPlan {
  Mat source_points;  // count x n
  Mat target_points;  // count x n, target_points.row(assignment[i]) pairs with source i
  std::vector<int> assignment;
  double cost = 0.0;
  double duality_gap = 0.0;
  bool exact = true;
  Vec displacement_mean;
  double displacement_variance = 0.0;  // mean |d - mean|^2
  double scale = 1.0;                  // lambda
  double region_volume = 0.0;          // |E| before scaling
  double target_volume = 0.0;          // |K0|
  Vec x0;
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(source_points.rows()); }
  int dim() const { return static_cast<int>(source_points.cols()); }
  Vec target_of(int i) const { return target_points.row(assignment[i]).transpose(); }
};

/// Throws NumericalError above kMaxExactAssignment points unless the
/// entropic solver is requested.
TransportPlan solve_transport(const Region& E, const SectorBody& K0, int count, std::uint64_t seed,
                              const TransportOptions& options = {});

/// Local-linear estimate of the transport map, evaluated at boundary points.
struct TraceEstimator {
  double bandwidth = 0.0;
  /// Fitted T(x) at each query point.
  std::vector<Vec> values;
  /// weights[q][k] multiplies the target of source neighbors[q][k].
  std::vector<std::vector<int>> neighbors;
  std::vector<std::vector<double>> weights;
  /// Mean squared residual per coordinate of the local fits.
  double noise_variance = 0.0;
};

/// Fits [1, y - x] to the paired targets of the sources within the bandwidth
/// of each query point x. The bandwidth doubles until n + 2 sources are found.
TraceEstimator estimate_trace(const TransportPlan& plan, const std::vector<Vec>& queries, double bandwidth);

/// 2 count^{-1/n} diam(lambda E).
double default_bandwidth(const TransportPlan& plan, const Region& scaled_region);

struct ChainOptions {
  long boundary_samples = 2000;
  double bandwidth = 0.0;  // 0 picks default_bandwidth
  /// Subtracts the boundary bias of a null plan (lambda E onto itself, whose
  /// continuum map is the identity) from the fitted boundary values.
  bool debias = true;
  MeasureOptions measure;
};

struct GromovChainReport {
  Estimate n_vol;
  Estimate boundary_transport_integral;
  Estimate aniso_perimeter;
  Estimate rel_perimeter;
  /// Consecutive differences, each expected to be >= 0.
  Estimate margins[3];
  /// Part of the transport integral coming from points on the cone boundary
  /// and the largest value of T . nu seen there (expected <= 0).
  Estimate cone_part;
  double cone_sign_max = 0.0;
  /// int (T_null - x) . nu, already removed from the transport integral.
  double boundary_bias = 0.0;
  double bandwidth = 0.0;
  double scale = 1.0;

  /// Every margin >= -k sigma.
  bool monotone(double k = 3.0) const;
};

/// Evaluates n|E| <= int T.nu <= P_K(E) <= P(E|C) on lambda E, with K the body
/// the plan transports to (taken relative to x0).
GromovChainReport gromov_chain_report(const Region& E, const ConvexCone& cone, const SectorBody& K0,
                                      const TransportPlan& plan, const ChainOptions& options = {});

struct TraceIntegral {
  Estimate centred;    // int over dE n C of |1 - |x - alpha|| on E itself
  Estimate transport;  // int over d(lambda E) n C of (1 - |T - x0|)
  double bound = 0.0;  // n |K| mu(E)
  double mu = 0.0;
};

TraceIntegral trace_integral(const Region& E, const ConvexCone& cone, const TransportPlan& plan, const Vec& alpha,
                             const ChainOptions& options = {});

struct AlphaCandidates {
  Vec ot;   // (x0 - displacement_mean) / lambda
  Vec fit;  // argmin of |E delta (alpha + rK)|
  double ot_value = 0.0;   // |E delta (ot + rK)| / |E|
  double fit_value = 0.0;  // |E delta (fit + rK)| / |E|
};

AlphaCandidates estimate_alpha(const Region& E, const SectorBody& K, const TransportPlan& plan,
                               const DeficitOptions& options = {});

/// x -> L x + t with L symmetric positive definite.
struct AffineMap {
  Mat L;
  Vec t;
};

/// x -> phi(|x|) x / |x| with phi, phi' > 0.
struct RadialMap {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
};

/// int_E (div T - n det(grad T)^{1/n}). Exact for affine maps. Radial maps use
/// Gauss-Kronrod in r on sectors centred at the apex and quasi-Monte Carlo
/// otherwise.
Estimate am_gm_gap(const AffineMap& map, const Region& E, const MeasureOptions& options = {});
Estimate am_gm_gap(const RadialMap& map, const Region& E, const MeasureOptions& options = {});

}  // namespace conestab
