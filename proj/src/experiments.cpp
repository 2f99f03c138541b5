#include "conestab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "conestab/polytope.hpp"
#include "conestab/rng.hpp"

namespace conestab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// A point of the open cone at unit height along its axis, moved along the
// lineality space by up to `spread`.
Vec interior_point(const ConvexCone& cone, CounterRng& rng, double height, double spread) {
  const int n = cone.dim();
  const int k = cone.lineality_dim();
  Vec u = Vec::Zero(n);
  for (int i = 0; i < k; ++i) u[i] = rng.uniform(-spread, spread);
  u[n - 1] = height;
  return cone.from_frame(u);
}

FamilyMember measure_member(double parameter, const Region& E, const ConvexCone& cone,
                            const DeficitOptions& options) {
  FamilyMember m;
  m.parameter = parameter;
  m.mu_closed = kNaN;
  const SectorBody K = SectorBody::sector(cone);
  const DeficitReport rep = deficit_report(E, cone, K, options);
  m.mu = rep.mu;
  m.delta_K = rep.delta_K;
  m.asymmetry = rep.asymmetry;
  m.constrained_asymmetry = rep.constrained_asymmetry;
  m.stability_ratio = rep.mu.value > 1e-12 ? rep.constrained_asymmetry / std::sqrt(rep.mu.value) : kNaN;
  return m;
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y, const std::vector<int>& idx,
                double* intercept = nullptr) {
  double mx = 0.0, my = 0.0;
  for (int i : idx) {
    mx += x[i];
    my += y[i];
  }
  mx /= idx.size();
  my /= idx.size();
  double sxx = 0.0, sxy = 0.0;
  for (int i : idx) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double s = sxx > 0.0 ? sxy / sxx : kNaN;
  if (intercept) *intercept = my - s * mx;
  return s;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

double symdiff_shift(const Region& A, const Vec& y, const MeasureOptions& options) {
  return symmetric_difference_volume(A.translated(y), A, options).value;
}

}  // namespace

Region edge_half_ball(const ConvexCone& cone, double distance, double radius) {
  if (cone.dim() != 2 || cone.lineality_dim() != 0) throw GeometryError("edge half ball needs a pointed 2D cone");
  const std::vector<Vec> rays = cone.extreme_rays();
  const Vec ray = *std::max_element(rays.begin(), rays.end(), [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
  const Mat& N = cone.normals();
  int facet = 0;
  for (int i = 1; i < N.rows(); ++i)
    if (std::abs(N.row(i).dot(ray)) < std::abs(N.row(facet).dot(ray))) facet = i;
  return Region::half_ball(distance * ray.normalized(), radius, N.row(facet).transpose());
}

double theta_closed_form_mu(double theta) {
  return kPi / (2.0 * std::sqrt(theta / 2.0) * std::sqrt(kPi / 2.0)) - 1.0;
}

Region random_polytope(const ConvexCone& cone, std::uint64_t seed, const RandomPolytopeOptions& options) {
  const int n = cone.dim();
  CounterRng rng(seed, 0x706F6C79);
  const Vec c = interior_point(cone, rng, rng.uniform(0.4, 0.9), 0.5);
  for (;;) {
    const int m = options.min_facets +
                  static_cast<int>(rng.uniform() * (options.max_facets - options.min_facets + 1));
    Mat A(m, n);
    Vec b(m);
    for (int i = 0; i < m; ++i) {
      A.row(i) = rng.unit_vector(n).transpose();
      b[i] = A.row(i).dot(c) + rng.uniform(options.min_radius, options.max_radius);
    }
    if (!polyhedron_is_bounded(A)) continue;
    double reach = 0.0;
    for (const Vec& v : polytope_vertices(A, b)) reach = std::max(reach, (v - c).norm());
    if (reach <= 3.0 * options.max_radius) return Region::polytope(A, b).clipped_to(cone);
  }
}

Region perturbed_sector(const ConvexCone& cone, std::uint64_t seed, double eps) {
  const int n = cone.dim();
  CounterRng rng(seed, 0x70657274);
  Mat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) G(i, j) = G(j, i) = rng.uniform(-1.0, 1.0);
  return Region::ellipsoid_sector(cone, Vec::Zero(n), Mat::Identity(n, n) + eps * G);
}

ExponentFit exponent_fit(const std::vector<double>& mu, const std::vector<double>& asymmetry,
                         const FitOptions& options) {
  if (mu.size() != asymmetry.size()) throw GeometryError("mu and asymmetry differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > options.mu_low && mu[i] < options.mu_high && asymmetry[i] > 0.0) {
      x.push_back(std::log(mu[i]));
      y.push_back(std::log(asymmetry[i]));
    }
  }
  const int m = static_cast<int>(x.size());
  if (m < 5) throw GeometryError("exponent fit needs at least 5 members with mu in the fit window");
  ExponentFit fit;
  fit.points = m;
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  fit.slope = slope_of(x, y, all, &fit.intercept);

  CounterRng rng(options.seed, 0x626F6F74);
  std::vector<double> slopes;
  std::vector<int> idx(m);
  for (int r = 0; r < options.resamples; ++r) {
    for (int& i : idx) i = std::min(m - 1, static_cast<int>(rng.uniform() * m));
    const double s = slope_of(x, y, idx);
    if (std::isfinite(s)) slopes.push_back(s);
  }
  if (slopes.empty()) {
    fit.ci_low = fit.ci_high = fit.slope;
  } else {
    const double tail = 0.5 * (1.0 - options.level);
    fit.ci_low = quantile(slopes, tail);
    fit.ci_high = quantile(slopes, 1.0 - tail);
  }
  return fit;
}

ExponentFit exponent_fit(const FamilyResult& family, const FitOptions& options) {
  std::vector<double> mu, a;
  for (const FamilyMember& m : family.members) {
    mu.push_back(m.mu.value);
    a.push_back(m.constrained_asymmetry);
  }
  return exponent_fit(mu, a, options);
}

FamilyResult theta_cone_family(const std::vector<double>& thetas, const ExperimentOptions& options) {
  std::vector<double> sorted = thetas;
  std::sort(sorted.begin(), sorted.end());
  FamilyResult out;
  out.name = "theta";
  out.cone = "planar(theta)";
  out.seed = options.deficit.measure.seed;
  out.samples = options.deficit.measure.interior_samples;
  for (double theta : sorted) {
    if (!(theta > 0.0 && theta < kPi)) throw GeometryError("theta must lie in (0, pi)");
    const ConvexCone cone = ConvexCone::planar(theta);
    const Region E = edge_half_ball(cone, options.distance);
    FamilyMember m = measure_member(theta, E, cone, options.deficit);
    m.mu_closed = theta_closed_form_mu(theta);
    m.identity_residual = std::abs(m.mu.value - m.mu_closed);
    if (m.identity_residual > options.tolerance + 3.0 * m.mu.std_error)
      throw NumericalError("relative deficit misses its closed form");
    out.members.push_back(m);
  }
  return out;
}

FamilyResult ellipsoid_family(const std::vector<int>& hs, const ConvexCone& cone, const ExperimentOptions& options) {
  const int n = cone.dim();
  if (cone.kind() != ConvexCone::Kind::Polyhedral || cone.normals().rows() != n ||
      !cone.normals().isApprox(Mat::Identity(n, n)))
    throw GeometryError("ellipsoid family needs the first orthant");
  std::vector<int> sorted = hs;
  std::sort(sorted.begin(), sorted.end());
  FamilyResult out;
  out.name = "ellipsoid";
  out.cone = "orthant(" + std::to_string(n) + ")";
  out.seed = options.deficit.measure.seed;
  out.samples = options.deficit.measure.interior_samples;
  const ConvexCone whole = ConvexCone::whole_space(n);
  const SectorBody ball = SectorBody::sector(whole);
  const double frac = std::pow(2.0, -n);
  for (int h : sorted) {
    if (h < 1) throw GeometryError("h must be positive");
    const double a = 1.0 + 1.0 / h;
    Vec axes = Vec::Ones(n);
    axes[0] = a;
    axes[1] = 1.0 / a;
    const Region full = Region::ellipsoid(Vec::Zero(n), axes.asDiagonal());
    const Region piece = full.clipped_to(cone);
    FamilyMember m = measure_member(h, piece, cone, options.deficit);
    const Estimate delta = anisotropic_deficit(full, ball, whole, options.deficit.measure);
    const double vol_res = std::abs(volume(piece, options.deficit.measure).value -
                                    frac * volume(full, options.deficit.measure).value);
    const double per_res = std::abs(relative_perimeter(piece, cone, options.deficit.measure).value -
                                    frac * relative_perimeter(full, whole, options.deficit.measure).value);
    const double sector_res = std::abs(cone.unit_sector_volume().value - frac * unit_ball_volume(n));
    m.identity_residual = std::max({std::abs(m.mu.value - delta.value), vol_res, per_res, sector_res});
    out.members.push_back(m);
  }
  FitOptions fo;
  fo.seed = options.deficit.measure.seed;
  try {
    out.fit = exponent_fit(out, fo);
  } catch (const GeometryError&) {
    out.fit.reset();
  }
  return out;
}

ConstantEstimate constant_estimator(const ConvexCone& cone, int trials, std::uint64_t seed,
                                    const ExperimentOptions& options) {
  if (trials < 1) throw GeometryError("trials must be at least 1");
  ConstantEstimate out;
  const SectorBody K = SectorBody::sector(cone);
  auto offer = [&](const Region& E, const std::string& kind) {
    double r = kNaN, mu = kNaN, a = kNaN;
    mu = relative_deficit(E, cone, options.deficit.measure).mu.value;
    if (mu > 1e-12) {
      // Equality cases have no ratio.
      a = constrained_asymmetry(E, K, cone, cone.lineality_dim(), options.deficit).value;
      r = a / std::sqrt(mu);
    }
    out.mus.push_back(mu);
    out.asymmetries.push_back(a);
    out.ratios.push_back(r);
    out.kinds.push_back(kind);
    if (std::isfinite(r) && (out.argmax < 0 || r > out.estimate)) {
      out.estimate = r;
      out.argmax = static_cast<int>(out.ratios.size()) - 1;
    }
  };
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = splitmix64(seed + static_cast<std::uint64_t>(t));
    if (t % 2 == 0)
      offer(random_polytope(cone, s), "polytope");
    else
      offer(perturbed_sector(cone, s), "perturbed_sector");
  }
  if (cone.dim() == 2 && cone.lineality_dim() == 0) offer(edge_half_ball(cone, options.distance), "edge_half_ball");
  return out;
}

std::vector<ThetaConstant> theta_constant_growth(const std::vector<double>& thetas, int trials, std::uint64_t seed,
                                                 const ExperimentOptions& options) {
  std::vector<double> sorted = thetas;
  std::sort(sorted.begin(), sorted.end());
  std::vector<ThetaConstant> out;
  for (double theta : sorted) {
    if (!(theta > 0.0 && theta < kPi)) throw GeometryError("theta must lie in (0, pi)");
    out.push_back({theta, constant_estimator(ConvexCone::planar(theta), trials, seed, options).estimate});
  }
  return out;
}

std::vector<Vec> scan_directions(int dim, int count, std::uint64_t seed) {
  std::vector<Vec> out;
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * kPi * i / count;
      out.push_back(Vec2(std::cos(a), std::sin(a)));
    }
  } else if (dim == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(1.0 - z * z);
      Vec v(3);
      v << r * std::cos(golden * i), r * std::sin(golden * i), z;
      out.push_back(v);
    }
  } else {
    CounterRng rng(seed, 0x646972);
    for (int i = 0; i < count; ++i) out.push_back(rng.unit_vector(dim));
  }
  return out;
}

TranslationScan translation_upper_scan(const Region& A, const std::vector<Vec>& directions, const std::vector<double>& ts,
                               const MeasureOptions& options) {
  const Box box = A.bounding_box();
  if (!box.finite()) throw GeometryError("region must be bounded");
  TranslationScan out;
  for (const Vec& d : directions) {
    if (d.size() != A.dim() || std::abs(d.norm() - 1.0) > 1e-9) throw GeometryError("directions must be unit vectors");
    for (double t : ts) {
      if (!(t > 0.0)) throw GeometryError("scan lengths must be positive");
      TranslationRow row{d, t, symdiff_shift(A, t * d, options), 0.0};
      row.ratio = row.f / t;
      out.rows.push_back(row);
      if (out.argsup < 0 || row.ratio > out.sup) {
        out.sup = row.ratio;
        out.argsup = static_cast<int>(out.rows.size()) - 1;
      }
    }
  }
  return out;
}

LowerBoundScan translation_lower_scan(const Region& A, int directions, int radii, const MeasureOptions& options) {
  if (directions < 1 || radii < 1) throw GeometryError("grid must be nonempty");
  const Box box = A.bounding_box();
  if (!box.finite()) throw GeometryError("region must be bounded");
  const Estimate v = volume(A, options);
  if (!(v.value > 1e-12)) throw GeometryError("degenerate region: zero volume");
  LowerBoundScan out;
  out.diam = box.diagonal();
  out.s = out.diam / 4.0;
  out.c = std::numeric_limits<double>::infinity();
  out.C = std::numeric_limits<double>::infinity();
  for (const Vec& d : scan_directions(A.dim(), directions, options.seed)) {
    for (int j = 1; j <= radii; ++j) {
      const double t = out.diam * j / radii;
      TranslationRow row{d, t, symdiff_shift(A, t * d, options), 0.0};
      row.ratio = row.f / t;
      if (t <= out.s) out.C = std::min(out.C, row.ratio);
      if (t >= out.s) out.c = std::min(out.c, row.f);
      out.rows.push_back(row);
    }
  }
  const double tol = 1e-12 * std::max(1.0, v.value);
  for (const TranslationRow& row : out.rows)
    if (row.f < std::min(out.c, out.C * row.t) - tol) ++out.violations;
  return out;
}

long WedgeReport::total_witnesses() const {
  long w = 0;
  for (const WedgeRow& r : rows) w += r.witnesses;
  return w;
}

WedgeReport wedge_identity_check(const ConvexCone& cone, const std::vector<Vec>& ys, long samples,
                                 std::uint64_t seed) {
  const int n = cone.dim();
  const int k = cone.lineality_dim();
  if (samples < 1) throw GeometryError("samples must be positive");
  const ReducedWedge W = reduced_wedge(cone);
  WedgeReport out;
  out.b_tilde = W.b_tilde;
  const Box base = W.piece.bounding_box();
  for (std::size_t idx = 0; idx < ys.size(); ++idx) {
    const Vec& y = ys[idx];
    if (y.size() != n) throw GeometryError("y has the wrong dimension");
    const Vec u = cone.to_frame(y);
    if (k > 0 && u.head(k).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, y.norm()))
      throw GeometryError("lemma hypothesis violated");
    WedgeRow row;
    row.y = y;
    row.upward = u[n - 1] >= 0.0;
    row.samples = samples;
    Box box = base;
    box.lo = box.lo.cwiseMin(base.lo + y);
    box.hi = box.hi.cwiseMax(base.hi + y);
    CounterRng rng(seed, 0x776564 + idx);
    long left = 0;
    for (long i = 0; i < samples; ++i) {
      const Vec x = rng.uniform_in_box(box.lo, box.hi);
      bool lhs, rhs;
      if (row.upward) {
        const bool in = W.contains(x);
        lhs = in && !W.contains(x - y);
        rhs = in && !cone.contains(x - y);
      } else {
        const bool in = W.contains(x - y);
        lhs = in && !W.contains(x);
        rhs = in && !cone.contains(x);
      }
      if (lhs) ++left;
      if (lhs != rhs) {
        ++row.witnesses;
        if (!row.witness) row.witness = x;
      }
    }
    const double p = static_cast<double>(left) / samples;
    const double vol = box.volume();
    row.measure = Estimate::sampled(vol * p, vol * std::sqrt(p * (1.0 - p) / samples));
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace conestab
