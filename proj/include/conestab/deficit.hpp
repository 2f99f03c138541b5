#pragma once

#include "conestab/body.hpp"
#include "conestab/measures.hpp"

namespace conestab {

struct DeficitOptions {
  MeasureOptions measure;
  double simplex_tol = 1e-6;
};

/// P_K(E): the boundary integral of the support function of K.
Estimate anisotropic_perimeter(const Region& region, const SectorBody& K, const ConvexCone& cone,
                               const MeasureOptions& options = {});

struct RelativeDeficit {
  Estimate mu;        // P(E|C) / (n |K|^{1/n} |E|^{(n-1)/n}) - 1
  Estimate mu_sector;  // (P(E|C) - H^{n-1}(dB_s n C)) / H^{n-1}(dB_s n C)
  Estimate volume;
  Estimate rel_perimeter;
  double s = 0.0;  // (|E| / |K|)^{1/n}
};

RelativeDeficit relative_deficit(const Region& region, const ConvexCone& cone, const MeasureOptions& options = {});

/// delta_K(E) = P_K(E) / (n |K|^{1/n} |E|^{(n-1)/n}) - 1.
Estimate anisotropic_deficit(const Region& region, const SectorBody& K, const ConvexCone& cone,
                             const MeasureOptions& options = {});

struct AsymmetryResult {
  double value = 0.0;
  Vec argmin;  // world coordinates
  double r = 0.0;
  int evaluations = 0;
};

/// inf over x0 of |E delta (x0 + rK)| / |E| with |rK| = |E|. Each point of
/// `extra_starts` seeds one more simplex run and is itself a candidate.
AsymmetryResult asymmetry_index(const Region& region, const SectorBody& K, const DeficitOptions& options = {},
                                const std::vector<Vec>& extra_starts = {});

/// |E delta (x0 + rK)| / |E| at one translation, with the sampling budget the
/// optimizers use.
double asymmetry_at(const Region& region, const SectorBody& K, const Vec& x0, const DeficitOptions& options = {});

/// The same infimum over translations in the first k frame directions of the
/// cone; k = 0 evaluates at the origin. `argmin` is in world coordinates.
AsymmetryResult constrained_asymmetry(const Region& region, const SectorBody& K, const ConvexCone& cone, int k,
                                      const DeficitOptions& options = {});

/// constrained asymmetry / sqrt(mu). Throws GeometryError when mu <= 1e-12.
double stability_ratio(const Region& region, const ConvexCone& cone, const DeficitOptions& options = {});

struct DeficitReport {
  Estimate volume;
  Estimate rel_perimeter;
  Estimate aniso_perimeter;
  Estimate mu;
  Estimate mu_sector;
  Estimate delta_K;
  double s = 0.0;
  double asymmetry = 0.0;
  double constrained_asymmetry = 0.0;
  Vec asymmetry_argmin;
  Vec best_translation;  // frame coordinates; only the first k may be nonzero
  double isoperimetric_margin = 0.0;
  double n_K = 0.0;      // n |K|
  bool exact = true;
};

DeficitReport deficit_report(const Region& region, const ConvexCone& cone, const SectorBody& K,
                             const DeficitOptions& options = {});

}  // namespace conestab
