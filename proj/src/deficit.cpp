#include "conestab/deficit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conestab/numerics.hpp"

namespace conestab {

namespace {

const ConvexCone& gauge_cone(const SectorBody& K, const ConvexCone& fallback) {
  return K.has_cone() ? K.cone() : fallback;
}

// Relative standard error.
double rel(const Estimate& e) { return e.value != 0.0 ? e.std_error / std::abs(e.value) : 0.0; }

Estimate normalized_gap(const Estimate& P, const Estimate& V, const Estimate& omega, int n) {
  // P / (n |K|^{1/n} |E|^{(n-1)/n}) - 1 with n |K| = omega.
  const double Kvol = omega.value / n;
  const double denom = n * std::pow(Kvol, 1.0 / n) * std::pow(V.value, (n - 1.0) / n);
  const double q = P.value / denom;
  const double r = std::hypot(rel(P), (n - 1.0) / n * rel(V), rel(omega) / n);
  return {q - 1.0, q * r, P.exact && V.exact && omega.exact};
}

struct Objective {
  const Region& E;
  const SectorBody& K;
  double r;
  double volume;
  MeasureOptions measure;

  double operator()(const Vec& x0) const {
    const Region target = K.scaled(r).translated(x0).to_region();
    return symmetric_difference_volume(E, target, measure).value / volume;
  }
};

struct Best {
  double value = std::numeric_limits<double>::infinity();
  Vec arg;
  void offer(double v, const Vec& a) {
    const double tol = 1e-12 * std::max(1.0, std::abs(value));
    if (v < value - tol || (v <= value + tol && (arg.size() == 0 || lex_less(a, arg)))) {
      value = v;
      arg = a;
    }
  }
};

double ratio_scale(const Region& E) {
  const Box b = E.bounding_box();
  return b.finite() ? b.diagonal() : 1.0;
}

// Multi-start simplex over x0 = B t, t in R^k.
AsymmetryResult minimize_over(const Objective& f, const Mat& B, const std::vector<Vec>& starts, double step,
                              double tol) {
  AsymmetryResult out;
  Best best;
  for (const Vec& t0 : starts) {
    const SimplexResult r = nelder_mead([&](const Vec& t) { return f(B * t); }, t0, step, tol, 3000);
    out.evaluations += r.evaluations;
    best.offer(r.value, B * r.argmin);
    best.offer(f(B * t0), B * t0);
  }
  out.value = best.value;
  out.argmin = best.arg;
  return out;
}

Objective make_objective(const Region& E, const SectorBody& K, const DeficitOptions& options) {
  const int n = E.dim();
  const Estimate vE = volume(E, options.measure);
  if (!(vE.value > 0.0)) throw GeometryError("zero volume");
  const double r = std::pow(vE.value / K.volume().value, 1.0 / n);
  MeasureOptions m = options.measure;
  m.interior_samples = std::min<long>(m.interior_samples, 40000);
  return Objective{E, K, r, vE.value, m};
}

std::vector<Vec> corner_starts(const Vec& base, double delta) {
  const int n = static_cast<int>(base.size());
  std::vector<Vec> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec v = base;
    for (int i = 0; i < n; ++i) v[i] += (mask >> i & 1) ? delta : -delta;
    out.push_back(v);
  }
  return out;
}

AsymmetryResult asymmetry_with_extra(const Region& region, const SectorBody& K, const DeficitOptions& options,
                                     const std::vector<Vec>& extra) {
  const int n = region.dim();
  const Objective f = make_objective(region, K, options);
  const Vec cE = centroid(region, options.measure);
  const Vec cK = centroid(K.scaled(f.r).to_region(), options.measure);
  const Vec base = cE - cK;
  const double diam = ratio_scale(region);
  std::vector<Vec> starts = {base, Vec::Zero(n)};
  for (const Vec& v : corner_starts(base, 0.1 * diam)) starts.push_back(v);
  for (const Vec& v : extra) starts.push_back(v);
  AsymmetryResult out = minimize_over(f, Mat::Identity(n, n), starts, 0.05 * diam, options.simplex_tol);
  out.r = f.r;
  return out;
}

}  // namespace

Estimate anisotropic_perimeter(const Region& region, const SectorBody& K, const ConvexCone& cone,
                               const MeasureOptions& options) {
  return boundary_integral(
      region, cone, [&](const Vec&, const Vec& nu) { return K.support(nu).mid(); }, false, options);
}

RelativeDeficit relative_deficit(const Region& region, const ConvexCone& cone, const MeasureOptions& options) {
  const int n = region.dim();
  RelativeDeficit d;
  d.volume = volume(region, options);
  if (!(d.volume.value > 0.0)) throw GeometryError("zero volume");
  d.rel_perimeter = relative_perimeter(region, cone, options);
  const Estimate& omega = cone.solid_angle();
  d.mu = normalized_gap(d.rel_perimeter, d.volume, omega, n);
  d.s = std::pow(d.volume.value / (omega.value / n), 1.0 / n);
  const double arc = std::pow(d.s, n - 1) * omega.value;
  const double q = d.rel_perimeter.value / arc;
  d.mu_sector = {(d.rel_perimeter.value - arc) / arc,
                q * std::hypot(rel(d.rel_perimeter), (n - 1.0) / n * rel(d.volume), rel(omega) / n),
                d.mu.exact};
  return d;
}

Estimate anisotropic_deficit(const Region& region, const SectorBody& K, const ConvexCone& cone,
                             const MeasureOptions& options) {
  const int n = region.dim();
  const Estimate V = volume(region, options);
  if (!(V.value > 0.0)) throw GeometryError("zero volume");
  const Estimate P = anisotropic_perimeter(region, K, cone, options);
  return normalized_gap(P, V, static_cast<double>(n) * K.volume(), n);
}

double asymmetry_at(const Region& region, const SectorBody& K, const Vec& x0, const DeficitOptions& options) {
  return make_objective(region, K, options)(x0);
}

AsymmetryResult asymmetry_index(const Region& region, const SectorBody& K, const DeficitOptions& options,
                                const std::vector<Vec>& extra_starts) {
  return asymmetry_with_extra(region, K, options, extra_starts);
}

AsymmetryResult constrained_asymmetry(const Region& region, const SectorBody& K, const ConvexCone& cone, int k,
                                      const DeficitOptions& options) {
  const int n = region.dim();
  if (k < 0 || k > cone.lineality_dim()) throw GeometryError("k must lie between 0 and the lineality dimension");
  const Objective f = make_objective(region, K, options);
  AsymmetryResult out;
  out.r = f.r;
  if (k == 0) {
    out.argmin = Vec::Zero(n);
    out.value = f(out.argmin);
    out.evaluations = 1;
    return out;
  }
  const Mat B = cone.frame().topRows(k).transpose();
  const Vec cE = centroid(region, options.measure);
  const Vec cK = centroid(K.scaled(f.r).to_region(), options.measure);
  const Vec base = B.transpose() * (cE - cK);
  const double diam = ratio_scale(region);
  std::vector<Vec> starts = {base, Vec::Zero(k)};
  for (const Vec& v : corner_starts(base, 0.1 * diam)) starts.push_back(v);
  AsymmetryResult res = minimize_over(f, B, starts, 0.05 * diam, options.simplex_tol);
  res.r = f.r;
  return res;
}

double stability_ratio(const Region& region, const ConvexCone& cone, const DeficitOptions& options) {
  const RelativeDeficit d = relative_deficit(region, cone, options.measure);
  if (!(d.mu.value > 1e-12)) throw GeometryError("equality case; ratio undefined");
  const SectorBody K = SectorBody::sector(cone);
  const AsymmetryResult a = constrained_asymmetry(region, K, cone, cone.lineality_dim(), options);
  return a.value / std::sqrt(d.mu.value);
}

DeficitReport deficit_report(const Region& region, const ConvexCone& cone, const SectorBody& K,
                             const DeficitOptions& options) {
  const int n = region.dim();
  DeficitReport rep;
  const RelativeDeficit d = relative_deficit(region, cone, options.measure);
  rep.volume = d.volume;
  rep.rel_perimeter = d.rel_perimeter;
  rep.mu = d.mu;
  rep.mu_sector = d.mu_sector;
  rep.s = d.s;
  rep.aniso_perimeter = anisotropic_perimeter(region, K, gauge_cone(K, cone), options.measure);
  const Estimate nK = static_cast<double>(n) * K.volume();
  rep.delta_K = normalized_gap(rep.aniso_perimeter, rep.volume, nK, n);
  rep.n_K = cone.solid_angle().value;
  const double iso = n * std::pow(rep.n_K / n, 1.0 / n) * std::pow(rep.volume.value, (n - 1.0) / n);
  rep.isoperimetric_margin = rep.rel_perimeter.value - iso;

  const int k = cone.lineality_dim();
  const AsymmetryResult c = constrained_asymmetry(region, K, cone, k, options);
  const AsymmetryResult a = asymmetry_with_extra(region, K, options, {c.argmin});
  rep.asymmetry = std::min(a.value, c.value);
  rep.asymmetry_argmin = a.value <= c.value ? a.argmin : c.argmin;
  rep.constrained_asymmetry = c.value;
  rep.best_translation = cone.frame() * c.argmin;
  rep.best_translation.tail(n - k).setZero();
  rep.exact = rep.volume.exact && rep.rel_perimeter.exact && rep.aniso_perimeter.exact;
  return rep;
}

}  // namespace conestab
