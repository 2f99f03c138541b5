#include "conestab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "conestab/numerics.hpp"
#include "conestab/rng.hpp"

namespace conestab {

namespace {

Mat to_matrix(const std::vector<Vec>& pts, int n) {
  Mat M(static_cast<Eigen::Index>(pts.size()), n);
  for (std::size_t i = 0; i < pts.size(); ++i) M.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return M;
}

Vec offset_of(const TransportPlan& plan) {
  return plan.x0.size() == plan.dim() ? plan.x0 : Vec::Zero(plan.dim());
}

// Checks that `plan` was solved on E and returns lambda E.
Region scaled_region(const Region& E, const TransportPlan& plan, const MeasureOptions& measure) {
  if (plan.count() == 0) throw GeometryError("plan is empty");
  if (plan.dim() != E.dim()) throw GeometryError("plan and region differ in dimension");
  const Estimate v = volume(E, measure);
  const double tol = 1e-6 * std::max(1.0, plan.region_volume) + 4.0 * v.std_error;
  if (std::abs(v.value - plan.region_volume) > tol) throw GeometryError("plan was solved on a different region");
  return E.scaled(plan.scale);
}

// Standard error of sum_q c_q . T(x_q) induced by the residual noise of the
// local fits.
double smoother_error(const TraceEstimator& est, int count, int n, const std::vector<Vec>& c) {
  Mat coef = Mat::Zero(count, n);
  for (std::size_t q = 0; q < c.size(); ++q) {
    if (c[q].size() == 0) continue;
    const auto& nb = est.neighbors[q];
    const auto& wt = est.weights[q];
    for (std::size_t k = 0; k < nb.size(); ++k) coef.row(nb[k]) += wt[k] * c[q].transpose();
  }
  return std::sqrt(est.noise_variance * coef.squaredNorm());
}

Assignment solve(const Mat& X, const Mat& Y, bool entropic, const EntropicOptions& options) {
  return entropic ? solve_entropic(X, Y, options) : solve_assignment(X, Y);
}

// Fitted boundary values of the plan's map, optionally corrected by a null
// plan. Errors of linear functionals combine both smoothers.
struct BoundaryTrace {
  std::vector<Vec> values;
  TraceEstimator main;
  std::optional<TraceEstimator> null;
  int count = 0;
  int n = 0;
  double bias = 0.0;

  double error(const std::vector<Vec>& c) const {
    const double e = smoother_error(main, count, n, c);
    return null ? std::hypot(e, smoother_error(*null, count, n, c)) : e;
  }
};

BoundaryTrace boundary_trace(const TransportPlan& plan, const Region& F, const SurfaceSample& S, double h,
                             bool debias) {
  BoundaryTrace bt;
  bt.count = plan.count();
  bt.n = plan.dim();
  bt.main = estimate_trace(plan, S.points, h);
  bt.values = bt.main.values;
  if (!debias) return bt;
  TransportPlan null;
  null.source_points = to_matrix(sample_interior(F, bt.count, splitmix64(plan.seed ^ 0x6E756C6C31), true).points, bt.n);
  null.target_points = to_matrix(sample_interior(F, bt.count, splitmix64(plan.seed ^ 0x6E756C6C32), true).points, bt.n);
  null.assignment = solve(null.source_points, null.target_points, !plan.exact, {}).col_for_row;
  bt.null = estimate_trace(null, S.points, h);
  for (std::size_t q = 0; q < S.size(); ++q) {
    const Vec b = bt.null->values[q] - S.points[q];
    bt.values[q] -= b;
    bt.bias += S.weights[q] * b.dot(S.normals[q]);
  }
  return bt;
}

}  // namespace

TransportPlan solve_transport(const Region& E, const SectorBody& K0, int count, std::uint64_t seed,
                              const TransportOptions& options) {
  const int n = E.dim();
  if (K0.dim() != n) throw GeometryError("region and body differ in dimension");
  if (count < 1) throw GeometryError("count must be positive");
  const bool entropic = options.entropic || count > kMaxExactAssignment;
  if (!options.entropic && count > kMaxExactAssignment)
    throw NumericalError("count exceeds the exact solver limit of 5000; request the entropic solver");

  TransportPlan plan;
  plan.seed = seed;
  plan.x0 = options.x0.size() == n ? options.x0 : Vec::Zero(n);
  plan.region_volume = volume(E).value;
  plan.target_volume = K0.volume().value;
  if (!(plan.region_volume > 0.0) || !(plan.target_volume > 0.0)) throw GeometryError("zero volume");
  plan.scale = std::pow(plan.target_volume / plan.region_volume, 1.0 / n);
  const Region F = E.scaled(plan.scale);

  plan.source_points = to_matrix(sample_interior(F, count, splitmix64(seed), true).points, n);
  plan.target_points = to_matrix(sample_interior(K0.to_region(), count, splitmix64(seed ^ 0x746172), true).points, n);

  const Assignment a = solve(plan.source_points, plan.target_points, entropic, options.entropic_options);
  plan.assignment = a.col_for_row;
  plan.cost = a.cost;
  plan.duality_gap = std::max(0.0, a.gap());
  plan.exact = a.exact;

  Mat d(count, n);
  for (int i = 0; i < count; ++i) d.row(i) = plan.target_points.row(plan.assignment[i]) - plan.source_points.row(i);
  plan.displacement_mean = d.colwise().mean().transpose();
  plan.displacement_variance = (d.rowwise() - plan.displacement_mean.transpose()).rowwise().squaredNorm().mean();
  return plan;
}

double default_bandwidth(const TransportPlan& plan, const Region& scaled_region) {
  const Box b = scaled_region.bounding_box();
  return 2.0 * std::pow(static_cast<double>(plan.count()), -1.0 / plan.dim()) * b.diagonal();
}

TraceEstimator estimate_trace(const TransportPlan& plan, const std::vector<Vec>& queries, double bandwidth) {
  const int n = plan.dim();
  const int N = plan.count();
  if (N < n + 2) throw NumericalError("too few transport samples for a local fit");
  TraceEstimator est;
  est.bandwidth = bandwidth;
  double rss = 0.0;
  long rows = 0;
  for (const Vec& x : queries) {
    std::vector<int> nb;
    for (double h = bandwidth;; h *= 2.0) {
      nb.clear();
      for (int j = 0; j < N; ++j)
        if ((plan.source_points.row(j).transpose() - x).squaredNorm() <= h * h) nb.push_back(j);
      if (static_cast<int>(nb.size()) >= n + 2) break;
    }
    const int m = static_cast<int>(nb.size());
    Mat A(m, n + 1);
    Mat T(m, n);
    for (int k = 0; k < m; ++k) {
      A(k, 0) = 1.0;
      A.row(k).tail(n) = plan.source_points.row(nb[k]) - x.transpose();
      T.row(k) = plan.target_points.row(plan.assignment[nb[k]]);
    }
    const Mat P = A.completeOrthogonalDecomposition().pseudoInverse();
    const Mat beta = P * T;
    rss += (T - A * beta).squaredNorm();
    rows += m;
    est.values.push_back(beta.row(0).transpose());
    est.neighbors.push_back(std::move(nb));
    std::vector<double> w(m);
    for (int k = 0; k < m; ++k) w[k] = P(0, k);
    est.weights.push_back(std::move(w));
  }
  est.noise_variance = rows > 0 ? rss / (static_cast<double>(rows) * n) : 0.0;
  return est;
}

bool GromovChainReport::monotone(double k) const {
  for (const Estimate& m : margins)
    if (m.value < -k * m.std_error) return false;
  return true;
}

GromovChainReport gromov_chain_report(const Region& E, const ConvexCone& cone, const SectorBody& K0,
                                      const TransportPlan& plan, const ChainOptions& options) {
  const int n = E.dim();
  if (cone.dim() != n || K0.dim() != n) throw GeometryError("dimension mismatch");
  const Region F = scaled_region(E, plan, options.measure);
  const Vec x0 = offset_of(plan);
  const SectorBody K = K0.translated(-x0);

  GromovChainReport r;
  r.scale = plan.scale;
  r.bandwidth = options.bandwidth > 0.0 ? options.bandwidth : default_bandwidth(plan, F);
  r.n_vol = static_cast<double>(n) * volume(F, options.measure);

  const SurfaceSample S = sample_boundary(F, cone, options.boundary_samples, splitmix64(options.measure.seed ^ 0x6263));
  const BoundaryTrace bt = boundary_trace(plan, F, S, r.bandwidth, options.debias);
  r.boundary_bias = bt.bias;
  std::vector<double> tn(S.size());
  std::vector<Vec> c_all(S.size()), c_cone(S.size());
  r.cone_sign_max = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < S.size(); ++q) {
    tn[q] = (bt.values[q] - x0).dot(S.normals[q]);
    c_all[q] = S.weights[q] * S.normals[q];
    if (S.on_cone[q]) {
      c_cone[q] = c_all[q];
      r.cone_sign_max = std::max(r.cone_sign_max, tn[q]);
    }
  }
  if (!std::isfinite(r.cone_sign_max)) r.cone_sign_max = 0.0;
  const Estimate quad = S.sum([&](std::size_t q) { return tn[q]; }, [](std::size_t) { return true; });
  r.boundary_transport_integral = {quad.value, std::hypot(quad.std_error, bt.error(c_all)),
                                   false};
  const Estimate cq = S.sum([&](std::size_t q) { return tn[q]; }, [&](std::size_t q) { return bool(S.on_cone[q]); });
  r.cone_part = {cq.value, std::hypot(cq.std_error, bt.error(c_cone)), false};

  r.aniso_perimeter = anisotropic_perimeter(F, K, cone, options.measure);
  r.rel_perimeter = relative_perimeter(F, cone, options.measure);
  r.margins[0] = r.boundary_transport_integral - r.n_vol;
  r.margins[1] = r.aniso_perimeter - r.boundary_transport_integral;
  r.margins[2] = r.rel_perimeter - r.aniso_perimeter;
  return r;
}

TraceIntegral trace_integral(const Region& E, const ConvexCone& cone, const TransportPlan& plan, const Vec& alpha,
                             const ChainOptions& options) {
  const int n = E.dim();
  if (alpha.size() != n) throw GeometryError("alpha has the wrong dimension");
  TraceIntegral out;
  out.centred = boundary_integral(
      E, cone, [&](const Vec& x, const Vec&) { return std::abs(1.0 - (x - alpha).norm()); }, true, options.measure);

  const Region F = scaled_region(E, plan, options.measure);
  const Vec x0 = offset_of(plan);
  const double h = options.bandwidth > 0.0 ? options.bandwidth : default_bandwidth(plan, F);
  const SurfaceSample S = sample_boundary(F, cone, options.boundary_samples, splitmix64(options.measure.seed ^ 0x7472));
  const BoundaryTrace bt = boundary_trace(plan, F, S, h, options.debias);
  std::vector<double> g(S.size());
  std::vector<Vec> c(S.size());
  for (std::size_t q = 0; q < S.size(); ++q) {
    const Vec d = bt.values[q] - x0;
    const double len = d.norm();
    g[q] = 1.0 - len;
    if (!S.on_cone[q] && len > 0.0) c[q] = -S.weights[q] / len * d;
  }
  const Estimate quad = S.sum([&](std::size_t q) { return g[q]; }, [&](std::size_t q) { return !S.on_cone[q]; });
  out.transport = {quad.value, std::hypot(quad.std_error, bt.error(c)), false};
  out.mu = relative_deficit(E, cone, options.measure).mu.value;
  out.bound = n * plan.target_volume * out.mu;
  return out;
}

AlphaCandidates estimate_alpha(const Region& E, const SectorBody& K, const TransportPlan& plan,
                               const DeficitOptions& options) {
  if (plan.dim() != E.dim() || K.dim() != E.dim()) throw GeometryError("dimension mismatch");
  AlphaCandidates out;
  out.ot = (offset_of(plan) - plan.displacement_mean) / plan.scale;
  const AsymmetryResult fit = asymmetry_index(E, K, options, {out.ot});
  out.fit = fit.argmin;
  out.fit_value = fit.value;
  out.ot_value = asymmetry_at(E, K, out.ot, options);
  return out;
}

Estimate am_gm_gap(const AffineMap& map, const Region& E, const MeasureOptions& options) {
  const int n = E.dim();
  if (map.L.rows() != n || map.L.cols() != n) throw GeometryError("map has the wrong dimension");
  const double scale = std::max(1.0, map.L.cwiseAbs().maxCoeff());
  if ((map.L - map.L.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw GeometryError("gradient is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Mat> eig(map.L);
  const Vec ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) throw GeometryError("gradient is not positive definite");
  const double geo = std::exp(ev.array().log().mean());
  const double per_point = std::max(0.0, ev.sum() - n * geo);
  return per_point * volume(E, options);
}

Estimate am_gm_gap(const RadialMap& map, const Region& E, const MeasureOptions& options) {
  const int n = E.dim();
  auto density = [&](double r) {
    const double a = map.dphi(r);
    const double b = map.phi(r) / r;
    if (!(a > 0.0) || !(b > 0.0)) throw GeometryError("gradient is not positive definite");
    const double geo = std::exp((std::log(a) + (n - 1) * std::log(b)) / n);
    return std::max(0.0, a + (n - 1) * b - n * geo);
  };
  if (E.is_single_piece() && E.piece().sector && E.piece().sector->center.isZero(0.0)) {
    const SectorTag& tag = *E.piece().sector;
    const double omega = tag.cone->solid_angle().value;
    const double v = integrate([&](double r) { return r > 0.0 ? density(r) * omega * std::pow(r, n - 1) : 0.0; }, 0.0,
                               tag.radius, 1e-12, 1e-10);
    return Estimate::closed(v);
  }
  const long count = std::clamp<long>(options.interior_samples, 1000, 1L << 16);
  const InteriorSample s = sample_interior(E, count, options.seed, true);
  double sum = 0.0, sum2 = 0.0;
  for (const Vec& x : s.points) {
    const double r = x.norm();
    const double g = r > 0.0 ? density(r) : 0.0;
    sum += g;
    sum2 += g * g;
  }
  const double N = static_cast<double>(s.points.size());
  const double mean = sum / N;
  const double var = std::max(0.0, sum2 / N - mean * mean);
  const Estimate V = volume(E, options);
  return Estimate::sampled(V.value * mean, V.value * std::sqrt(var / N));
}

}  // namespace conestab
