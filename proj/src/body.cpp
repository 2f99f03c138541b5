#include "conestab/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conestab/measures.hpp"
#include "conestab/numerics.hpp"
#include "conestab/polytope.hpp"
#include "conestab/rng.hpp"

namespace conestab {

namespace {

void normalize_rows(Mat& A, Vec& b) {
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double len = A.row(i).norm();
    if (!(len > 0.0)) throw GeometryError("zero constraint row");
    A.row(i) /= len;
    b[i] /= len;
  }
}

}  // namespace

SectorBody SectorBody::sector(const ConvexCone& cone, double radius, std::optional<Vec> center) {
  if (!(radius > 0.0)) throw GeometryError("sector radius must be positive");
  SectorBody s;
  s.kind_ = Kind::SphericalSector;
  s.dim_ = cone.dim();
  s.cone_ = std::make_shared<const ConvexCone>(cone);
  s.radius_ = radius;
  s.center_ = center ? *center : Vec::Zero(cone.dim());
  if (s.center_.size() != s.dim_) throw GeometryError("sector center has wrong dimension");
  s.A_ = Mat(0, s.dim_);
  s.b_ = Vec(0);
  s.rebuild_piece();
  return s;
}

SectorBody SectorBody::polytope(const Mat& A, const Vec& b) {
  if (A.rows() != b.size()) throw GeometryError("polytope: A and b sizes differ");
  SectorBody s;
  s.kind_ = Kind::Polytope;
  s.dim_ = static_cast<int>(A.cols());
  s.A_ = A;
  s.b_ = b;
  normalize_rows(s.A_, s.b_);
  if (!polyhedron_is_bounded(s.A_)) throw GeometryError("not a body: polytope is unbounded");
  s.vertices_ = polytope_vertices(s.A_, s.b_);
  if (s.vertices_.empty()) throw GeometryError("not a body: polytope is empty");
  s.center_ = Vec::Zero(s.dim_);
  s.rebuild_piece();
  return s;
}

SectorBody SectorBody::clipped_sector(const ConvexCone& cone, double radius, const Vec& center,
                                      const Mat& A, const Vec& b) {
  SectorBody s = sector(cone, radius, center);
  s.kind_ = Kind::ClippedSector;
  s.A_ = A;
  s.b_ = b;
  normalize_rows(s.A_, s.b_);
  s.rebuild_piece();
  return s;
}

void SectorBody::rebuild_piece() {
  if (kind_ == Kind::Polytope) {
    piece_ = ConvexPiece{};
    piece_.A = A_;
    piece_.b = b_;
    return;
  }
  piece_ = Region::spherical_sector(*cone_, radius_, center_).piece();
  if (kind_ == Kind::ClippedSector) {
    piece_.sector.reset();
    const Eigen::Index m0 = piece_.A.rows();
    Mat A(m0 + A_.rows(), dim_);
    Vec b(m0 + A_.rows());
    A << piece_.A, A_;
    b << piece_.b, b_ + A_ * center_;
    piece_.A = std::move(A);
    piece_.b = std::move(b);
  }
}

const ConvexCone& SectorBody::cone() const {
  if (!cone_) throw GeometryError("polytope body has no cone");
  return *cone_;
}

Region SectorBody::to_region() const {
  switch (kind_) {
    case Kind::SphericalSector:
      return Region(piece_, "spherical_sector");
    case Kind::Polytope:
      return Region(piece_, "polytope");
    case Kind::ClippedSector:
      return Region(piece_, "clipped_sector");
  }
  return Region(piece_);
}

SectorBody SectorBody::translated(const Vec& t) const {
  SectorBody s = *this;
  if (kind_ == Kind::Polytope) {
    s.b_ = b_ + A_ * t;
    for (Vec& v : s.vertices_) v += t;
  } else {
    s.center_ = center_ + t;
  }
  s.rebuild_piece();
  return s;
}

SectorBody SectorBody::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw GeometryError("scale factor must be positive");
  SectorBody s = *this;
  if (kind_ == Kind::Polytope) {
    s.b_ = lambda * b_;
    for (Vec& v : s.vertices_) v *= lambda;
  } else {
    s.radius_ = lambda * radius_;
    s.center_ = lambda * center_;
    s.b_ = lambda * b_;
  }
  s.rebuild_piece();
  return s;
}

SupportBracket SectorBody::support(const Vec& nu) const {
  if (nu.size() != dim_) throw GeometryError("direction has wrong dimension");
  switch (kind_) {
    case Kind::Polytope: {
      double best = -std::numeric_limits<double>::infinity();
      for (const Vec& v : vertices_) best = std::max(best, nu.dot(v));
      return {best, best};
    }
    case Kind::SphericalSector: {
      const SupportBracket u = cone_->unit_support(nu);
      const double shift = nu.dot(center_);
      return {shift + radius_ * u.lower, shift + radius_ * u.upper};
    }
    case Kind::ClippedSector: {
      if (cone_->kind() == ConvexCone::Kind::Circular)
        throw GeometryError("support of a clipped circular sector is not supported");
      const Mat& N = cone_->normals();
      Mat A(N.rows() + A_.rows(), dim_);
      Vec b(N.rows() + A_.rows());
      A << -N, A_;
      b << Vec::Zero(N.rows()), b_ / radius_;
      const double v = ball_halfspace_support(nu, A, b);
      if (!std::isfinite(v)) throw GeometryError("not a body: clipped sector is empty");
      const double s = nu.dot(center_) + radius_ * v;
      return {s, s};
    }
  }
  return {};
}

Estimate SectorBody::volume() const {
  if (kind_ == Kind::SphericalSector) return std::pow(radius_, dim_) * cone_->unit_sector_volume();
  return conestab::volume(to_region());
}

double support_value(const SectorBody& body, const Vec& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw GeometryError("direction must be a unit vector");
  return body.support(direction).mid();
}

double minkowski_gauge(const ConvexPiece& piece, const Vec& z) {
  const int n = piece.dim();
  const Vec origin = Vec::Zero(n);
  if (!(piece.margin(origin) > 1e-12)) throw GeometryError("gauge undefined: origin is not interior");
  if (z.squaredNorm() == 0.0) return 0.0;
  double lambda = 0.0;
  for (Eigen::Index i = 0; i < piece.A.rows(); ++i)
    lambda = std::max(lambda, piece.A.row(i).dot(z) / piece.b[i]);
  if (piece.ellipsoid) {
    const Vec w = piece.ellipsoid->inverse * z;
    const Vec w0 = piece.ellipsoid->inverse * piece.ellipsoid->center;
    const double D = 1.0 - w0.squaredNorm();
    const double p = w.dot(w0);
    lambda = std::max(lambda, (-p + std::sqrt(p * p + D * w.squaredNorm())) / D);
  }
  if (piece.soc) {
    const SecondOrderCone& s = *piece.soc;
    auto inside = [&](double l) {
      const Vec v = z - l * s.apex;
      return s.g.dot(v) >= (s.G * v).norm();
    };
    if (!inside(lambda)) {
      double lo = lambda, hi = std::max(1.0, 2.0 * lambda);
      while (!inside(hi)) {
        lo = hi;
        hi *= 2.0;
      }
      for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? hi : lo) = mid;
      }
      lambda = hi;
    }
  }
  return lambda;
}

double minkowski_gauge(const SectorBody& body, const Vec& z) { return minkowski_gauge(body.piece(), z); }

namespace {

struct Extremum {
  double value;
  Vec arg;
};

// Fibonacci points on S^2.
std::vector<Vec> fibonacci_sphere(int count) {
  std::vector<Vec> pts;
  pts.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = golden * i;
    pts.push_back(Eigen::Vector3d(r * std::cos(t), r * std::sin(t), z));
  }
  return pts;
}

// Minimizes f over the unit circle: grid followed by golden-section search
// around the best local minima.
Extremum minimize_circle(const std::function<double(const Vec&)>& f, int grid, double tol) {
  auto at = [](double t) { return Vec(Vec2(std::cos(t), std::sin(t))); };
  std::vector<double> vals(grid);
  const double h = 2.0 * kPi / grid;
  for (int i = 0; i < grid; ++i) vals[i] = f(at(i * h));
  std::vector<int> minima;
  for (int i = 0; i < grid; ++i) {
    const double l = vals[(i + grid - 1) % grid], r = vals[(i + 1) % grid];
    if (vals[i] <= l && vals[i] <= r) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) { return vals[a] < vals[b]; });
  if (minima.size() > 8) minima.resize(8);
  Extremum best{std::numeric_limits<double>::infinity(), Vec()};
  for (int i : minima) {
    const double t = golden_section_minimize([&](double s) { return f(at(s)); }, (i - 1) * h, (i + 1) * h, tol);
    const double v = f(at(t));
    const double v0 = vals[i];
    const Vec arg = v <= v0 ? at(t) : at(i * h);
    const double val = std::min(v, v0);
    if (val < best.value || (val == best.value && lex_less(arg, best.arg))) best = {val, arg};
  }
  return best;
}

// Minimizes f over the unit sphere in R^n (n >= 3): seeded grid followed by
// simplex refinement on the normalised argument.
Extremum minimize_sphere(const std::function<double(const Vec&)>& f, int n, int grid, double tol) {
  std::vector<Vec> pts;
  if (n == 3) {
    pts = fibonacci_sphere(grid);
  } else {
    CounterRng rng(0x6A06E, static_cast<std::uint64_t>(n));
    for (int i = 0; i < grid; ++i) pts.push_back(rng.unit_vector(n));
  }
  std::vector<std::pair<double, int>> scored;
  scored.reserve(pts.size());
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) scored.emplace_back(f(pts[i]), i);
  std::sort(scored.begin(), scored.end());
  const double spacing = std::pow(unit_sphere_area(n) / grid, 1.0 / (n - 1));
  auto g = [&](const Vec& v) {
    const double len = v.norm();
    return len > 1e-12 ? f(v / len) : std::numeric_limits<double>::infinity();
  };
  Extremum best{std::numeric_limits<double>::infinity(), Vec()};
  const int starts = std::min<int>(6, static_cast<int>(scored.size()));
  for (int s = 0; s < starts; ++s) {
    const Vec& p = pts[scored[s].second];
    const SimplexResult r = nelder_mead(g, p, spacing, tol, 4000);
    Vec arg = r.argmin.normalized();
    double val = f(arg);
    if (scored[s].first < val) {
      val = scored[s].first;
      arg = p;
    }
    if (val < best.value || (val == best.value && lex_less(arg, best.arg))) best = {val, arg};
  }
  return best;
}

Extremum minimize_directions(const std::function<double(const Vec&)>& f, int n, int grid, double tol) {
  if (n == 1) {
    const double a = f(Vec::Constant(1, 1.0)), b = f(Vec::Constant(1, -1.0));
    return a <= b ? Extremum{a, Vec::Constant(1, 1.0)} : Extremum{b, Vec::Constant(1, -1.0)};
  }
  if (n == 2) return minimize_circle(f, grid, tol);
  return minimize_sphere(f, n, grid, tol);
}

}  // namespace

GaugeBounds gauge_bounds(const SectorBody& body, const GaugeOptions& options) {
  const int n = body.dim();
  if (!(body.piece().margin(Vec::Zero(n)) > 0.0)) throw GeometryError("gauge undefined: origin is not interior");
  int grid = options.grid;
  if (grid <= 0) grid = n == 2 ? 4096 : (n == 3 ? 2000 : 20000);
  auto h = [&](const Vec& v) { return body.support(v).mid(); };
  auto neg = [&](const Vec& v) { return -body.support(v).mid(); };
  const Extremum lo = minimize_directions(h, n, grid, options.tol);
  const Extremum hi = minimize_directions(neg, n, grid, options.tol);
  GaugeBounds out;
  out.m = lo.value;
  out.argmin = lo.arg;
  out.M = -hi.value;
  out.argmax = hi.arg;
  return out;
}

namespace {

double recentred_ratio(const SectorBody& K, const Vec& y, int gauge_grid) {
  GaugeOptions opts;
  opts.grid = gauge_grid;
  opts.tol = 1e-7;
  return gauge_bounds(K.translated(-y), opts).ratio();
}

struct Candidate {
  double ratio = std::numeric_limits<double>::infinity();
  Vec x0;
  bool better_than(const Candidate& o) const {
    const double scale = 1e-12 * std::max(1.0, std::abs(o.ratio));
    if (ratio < o.ratio - scale) return true;
    if (ratio > o.ratio + scale) return false;
    return o.x0.size() == 0 || lex_less(x0, o.x0);
  }
};

// Visits every point of the odd grid of `g` points per axis centered at c.
void for_each_grid_point(const Vec& c, const Vec& step, int g, const std::function<void(const Vec&)>& fn) {
  const int n = static_cast<int>(c.size());
  std::vector<int> idx(n, 0);
  const int half = g / 2;
  for (;;) {
    Vec p = c;
    for (int i = 0; i < n; ++i) p[i] += (idx[i] - half) * step[i];
    fn(p);
    int i = 0;
    while (i < n && ++idx[i] == g) idx[i++] = 0;
    if (i == n) return;
  }
}

}  // namespace

Recentring optimal_recentring(const SectorBody& K, const RecentringOptions& options) {
  const int n = K.dim();
  const Box box = K.bounding_box();
  if (!box.finite()) throw GeometryError("not a body: unbounded");
  int g = options.grid > 0 ? options.grid : (n == 2 ? 11 : (n == 3 ? 7 : 5));
  if (g % 2 == 0) ++g;
  const int levels = options.levels > 0 ? options.levels : (n == 2 ? 6 : (n == 3 ? 4 : 3));
  const int gauge_grid = n == 2 ? 720 : (n == 3 ? 600 : 4000);
  const double guard = 1e-9 * std::max(1.0, box.diagonal());

  Vec center = 0.5 * (box.lo + box.hi);
  Vec step = (box.hi - box.lo) / (g - 1);
  Candidate best;
  auto consider = [&](const Vec& y, Candidate& into) {
    if (!(K.piece().margin(y) > guard)) return;
    Candidate c;
    c.ratio = recentred_ratio(K, y, gauge_grid);
    c.x0 = (-y).array() + 0.0;
    if (c.better_than(into)) into = c;
  };
  for (int level = 0; level < levels; ++level) {
    Candidate lvl = best;
    for_each_grid_point(center, step, g, [&](const Vec& y) { consider(y, lvl); });
    if (lvl.x0.size() == 0) throw NumericalError("recentring grid found no interior point");
    best = lvl;
    center = -best.x0;
    step = 2.0 * step / (g - 1);
  }
  Candidate refined;
  for_each_grid_point(center, 0.5 * step, 5, [&](const Vec& y) { consider(y, refined); });

  Recentring out;
  out.x0 = best.x0;
  out.ratio = gauge_bounds(K.translated(best.x0)).ratio();
  out.refined_best = std::min(refined.ratio, best.ratio);
  out.certified = best.ratio <= 1.01 * out.refined_best;
  return out;
}

double pointed_height_constant(const Mat& normals, const Vec& height_axis) {
  const ConvexCone c = ConvexCone::polyhedral(normals, height_axis);
  if (c.lineality_dim() > 0) throw GeometryError("not pointed: the cone contains a line");
  const Vec a = height_axis.normalized();
  double least = std::numeric_limits<double>::infinity();
  for (const Vec& r : c.extreme_rays()) least = std::min(least, a.dot(r));
  if (!(least > 1e-12)) throw GeometryError("not pointed: the boundary meets {x_n = 0} away from 0");
  return 0.5 * least;
}

double boundary_height_constant(const ConvexCone& cone) {
  if (cone.kind() == ConvexCone::Kind::Circular) return 0.5 * std::cos(cone.half_angle());
  if (cone.lineality_dim() == cone.dim()) throw GeometryError("not pointed: the cone is the whole space");
  double least = std::numeric_limits<double>::infinity();
  for (const Vec& r : cone.extreme_rays()) least = std::min(least, cone.axis().dot(r));
  if (!(least > 1e-12)) throw GeometryError("not pointed: the boundary meets {x_n = 0} away from 0");
  return 0.5 * least;
}

ReducedWedge reduced_wedge(const ConvexCone& cone) {
  ReducedWedge w;
  const int n = cone.dim();
  const int k = cone.lineality_dim();
  w.b = boundary_height_constant(cone);
  w.gamma = 1.0 / (2.0 * w.b);
  w.M = 1;
  while ((k + w.gamma * w.gamma) * std::pow(w.b / w.M, 2) >= 0.25) ++w.M;
  w.b_tilde = w.b / w.M;
  w.piece = Region::spherical_sector(cone, 0.5, Vec::Zero(n)).piece();
  w.piece.sector.reset();
  const Mat& F = cone.frame();
  const Eigen::Index m0 = w.piece.A.rows();
  Mat A(m0 + 2 * k + 1, n);
  Vec b(m0 + 2 * k + 1);
  A.topRows(m0) = w.piece.A;
  b.head(m0) = w.piece.b;
  for (int i = 0; i < k; ++i) {
    A.row(m0 + 2 * i) = F.row(i);
    A.row(m0 + 2 * i + 1) = -F.row(i);
    b[m0 + 2 * i] = b[m0 + 2 * i + 1] = w.b_tilde;
  }
  A.row(m0 + 2 * k) = F.row(n - 1);
  b[m0 + 2 * k] = w.b_tilde;
  w.piece.A = std::move(A);
  w.piece.b = std::move(b);
  return w;
}

ProjectionSplit cone_projection_split(const Vec& y, const ConvexCone& cone) {
  const int k = cone.lineality_dim();
  const int d = cone.dim() - k;
  if (y.size() != d) throw GeometryError("split point must live in the pointed factor");
  ProjectionSplit s;
  if (k == 0) {
    if (cone.contains(y)) throw GeometryError("no split needed: point lies in the open cone");
    s.yc = cone.project(y);
  } else {
    const ConvexCone pointed = ConvexCone::polyhedral(cone.pointed_normals());
    if (pointed.contains(y)) throw GeometryError("no split needed: point lies in the open cone");
    s.yc = pointed.project(y);
  }
  s.yp = y - s.yc;
  return s;
}

}  // namespace conestab
