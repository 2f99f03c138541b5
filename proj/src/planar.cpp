#include "conestab/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conestab/numerics.hpp"

namespace conestab::planar {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 unit_circle(double t) { return {std::cos(t), std::sin(t)}; }

Vec2 ellipse_point(const Curve& c, double t) { return c.center + c.S * unit_circle(t); }

Vec2 ellipse_normal(const Curve& c, double t) {
  return (c.S.inverse().transpose() * unit_circle(t)).normalized();
}

double wrap(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0.0 ? t + kTwoPi : t;
}

Vec2 line_origin(const Curve& c) { return c.offset * c.normal; }
Vec2 line_direction(const Curve& c) { return {-c.normal.y(), c.normal.x()}; }

bool same_curve(const Curve& a, const Curve& b, double scale) {
  if (a.is_line != b.is_line) return false;
  const double tol = 1e-10;
  if (a.is_line) {
    if ((a.normal - b.normal).norm() < tol && std::abs(a.offset - b.offset) < tol * scale) return true;
    return (a.normal + b.normal).norm() < tol && std::abs(a.offset + b.offset) < tol * scale;
  }
  const Mat2 ga = a.S * a.S.transpose(), gb = b.S * b.S.transpose();
  return (a.center - b.center).norm() < tol * scale && (ga - gb).norm() < tol * scale * scale;
}

// Unit-circle parameters u where the line meets the ellipse.
std::vector<Vec2> line_ellipse_hits(const Curve& line, const Curve& ell) {
  std::vector<Vec2> out;
  const Vec2 q = ell.S.transpose() * line.normal;
  const double r = line.offset - line.normal.dot(ell.center);
  const double q2 = q.squaredNorm();
  const double ratio = r * r / q2;
  if (ratio > 1.0) return out;
  const Vec2 foot = (r / q2) * q;
  const Vec2 perp = Vec2(-q.y(), q.x()) / std::sqrt(q2);
  const double h = std::sqrt(std::max(0.0, 1.0 - ratio));
  out.push_back(foot + h * perp);
  if (h > 0.0) out.push_back(foot - h * perp);
  return out;
}

// Parameters on ellipse `a` where it crosses ellipse `b`.
std::vector<double> ellipse_ellipse_params(const Curve& a, const Curve& b) {
  std::vector<double> out;
  if (a.is_circle && b.is_circle) {
    const Vec2 dc = b.center - a.center;
    const double d = dc.norm();
    if (d == 0.0 || d > a.radius + b.radius || d < std::abs(a.radius - b.radius)) return out;
    const double along = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, a.radius * a.radius - along * along));
    const Vec2 e = dc / d, p(-e.y(), e.x());
    const Mat2 Sinv = a.S.inverse();
    for (double sgn : {1.0, -1.0}) {
      const Vec2 u = Sinv * (along * e + sgn * h * p);
      out.push_back(wrap(std::atan2(u.y(), u.x())));
      if (h == 0.0) break;
    }
    return out;
  }
  const Mat2 Binv = b.S.inverse();
  auto F = [&](double t) { return (Binv * (ellipse_point(a, t) - b.center)).squaredNorm() - 1.0; };
  constexpr int kSamples = 1024;
  double t_prev = 0.0, f_prev = F(0.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double t = kTwoPi * i / kSamples;
    const double f = F(t);
    if ((f_prev < 0.0) != (f < 0.0)) {
      double lo = t_prev, hi = t, flo = f_prev;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(wrap(0.5 * (lo + hi)));
    }
    t_prev = t;
    f_prev = f;
  }
  return out;
}

void sort_unique(std::vector<double>& v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  v = std::move(out);
}

}  // namespace

Vec2 Piece::point(const Curve& c, double s) const {
  if (!arc) return a + s * (b - a);
  return ellipse_point(c, t0 + s * (t1 - t0));
}

Vec2 Piece::outward_normal(const Curve& c, double s) const {
  Vec2 tangent;
  if (!arc) {
    tangent = b - a;
  } else {
    const double t = t0 + s * (t1 - t0);
    tangent = (t1 > t0 ? 1.0 : -1.0) * (c.S * Vec2(-std::sin(t), std::cos(t)));
  }
  return Vec2(tangent.y(), -tangent.x()).normalized();
}

double Piece::speed(const Curve& c, double s) const {
  if (!arc) return (b - a).norm();
  const double t = t0 + s * (t1 - t0);
  return (c.S * Vec2(-std::sin(t), std::cos(t))).norm() * std::abs(t1 - t0);
}

bool supported(const Region& region) {
  if (region.dim() != 2) return false;
  for (const ConvexPiece& p : region.leaves())
    if (p.soc) return false;
  return true;
}

Boundary Boundary::of(const Region& region) {
  if (!supported(region)) throw GeometryError("planar boundary needs a 2D region of half-planes and ellipses");
  const Box box = region.bounding_box();
  if (box.is_empty()) return Boundary{};
  if (!box.finite()) throw GeometryError("region is unbounded");
  Boundary out;
  out.scale = std::max(box.diagonal(), 1e-300);
  const double scale = out.scale;

  for (const ConvexPiece& p : region.leaves()) {
    std::vector<Curve> found;
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
      Curve c;
      c.is_line = true;
      c.normal = Vec2(p.A(i, 0), p.A(i, 1));
      c.offset = p.b[i];
      found.push_back(c);
    }
    if (p.ellipsoid) {
      Curve c;
      c.is_line = false;
      c.center = Vec2(p.ellipsoid->center[0], p.ellipsoid->center[1]);
      c.S = Mat2(p.ellipsoid->shape);
      if (c.S.determinant() < 0.0) c.S.col(1) *= -1.0;
      const Mat2 g = c.S * c.S.transpose();
      const double r2 = 0.5 * g.trace();
      c.is_circle = (g - r2 * Mat2::Identity()).norm() <= 1e-13 * r2;
      c.radius = std::sqrt(r2);
      found.push_back(c);
    }
    for (const Curve& c : found) {
      bool dup = false;
      for (const Curve& e : out.curves) dup = dup || same_curve(c, e, scale);
      if (!dup) out.curves.push_back(c);
    }
  }

  const double pad = 0.05 * scale + 1e-12;
  const Vec2 lo(box.lo[0] - pad, box.lo[1] - pad), hi(box.hi[0] + pad, box.hi[1] + pad);
  const double eps = 1e-9 * scale;
  const int m = static_cast<int>(out.curves.size());

  auto classify_mid = [&](const Vec2& mid, const Vec2& n) {
    const bool in_minus = region.contains(Vec(mid - eps * n));
    const bool in_plus = region.contains(Vec(mid + eps * n));
    if (in_minus == in_plus) return 0;
    return in_minus ? 1 : -1;
  };

  for (int i = 0; i < m; ++i) {
    const Curve& c = out.curves[i];
    if (c.is_line) {
      const Vec2 p0 = line_origin(c), d = line_direction(c);
      double s_lo = -std::numeric_limits<double>::infinity(), s_hi = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 2; ++k) {
        if (std::abs(d[k]) < 1e-15) {
          if (p0[k] < lo[k] || p0[k] > hi[k]) s_lo = 1.0, s_hi = 0.0;
          continue;
        }
        double a = (lo[k] - p0[k]) / d[k], b = (hi[k] - p0[k]) / d[k];
        if (a > b) std::swap(a, b);
        s_lo = std::max(s_lo, a);
        s_hi = std::min(s_hi, b);
      }
      if (!(s_hi > s_lo)) continue;
      std::vector<double> cuts = {s_lo, s_hi};
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const Curve& o = out.curves[j];
        if (o.is_line) {
          const double det = cross(c.normal, o.normal);
          if (std::abs(det) < 1e-14) continue;
          Mat2 M;
          M << c.normal.transpose(), o.normal.transpose();
          const Vec2 x = M.inverse() * Vec2(c.offset, o.offset);
          cuts.push_back((x - p0).dot(d));
        } else {
          for (const Vec2& u : line_ellipse_hits(c, o)) cuts.push_back((o.center + o.S * u - p0).dot(d));
        }
      }
      for (double& s : cuts) s = std::clamp(s, s_lo, s_hi);
      sort_unique(cuts, 1e-13 * scale);
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Vec2 a = p0 + cuts[k] * d, b = p0 + cuts[k + 1] * d;
        const int side = classify_mid(0.5 * (a + b), c.normal);
        if (side == 0) continue;
        Piece pc;
        pc.curve = i;
        pc.arc = false;
        pc.a = side > 0 ? a : b;
        pc.b = side > 0 ? b : a;
        pc.length = (b - a).norm();
        out.pieces.push_back(pc);
      }
    } else {
      std::vector<double> cuts;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const Curve& o = out.curves[j];
        if (o.is_line) {
          for (const Vec2& u : line_ellipse_hits(o, c)) cuts.push_back(wrap(std::atan2(u.y(), u.x())));
        } else {
          for (double t : ellipse_ellipse_params(c, o)) cuts.push_back(t);
        }
      }
      sort_unique(cuts, 1e-13);
      if (cuts.size() > 1 && cuts.front() + kTwoPi - cuts.back() <= 1e-13) cuts.pop_back();
      std::vector<std::pair<double, double>> spans;
      if (cuts.empty()) {
        spans.emplace_back(0.0, kTwoPi);
      } else {
        for (std::size_t k = 0; k < cuts.size(); ++k) {
          const double t_next = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + kTwoPi;
          spans.emplace_back(cuts[k], t_next);
        }
      }
      for (const auto& [ta, tb] : spans) {
        const double tm = 0.5 * (ta + tb);
        const int side = classify_mid(ellipse_point(c, tm), ellipse_normal(c, tm));
        if (side == 0) continue;
        Piece pc;
        pc.curve = i;
        pc.arc = true;
        pc.t0 = side > 0 ? ta : tb;
        pc.t1 = side > 0 ? tb : ta;
        pc.a = ellipse_point(c, pc.t0);
        pc.b = ellipse_point(c, pc.t1);
        if (c.is_circle) {
          pc.length = c.radius * (tb - ta);
        } else {
          pc.length = conestab::integrate([&](double s) { return pc.speed(c, s); }, 0.0, 1.0, 1e-14, 1e-14);
        }
        out.pieces.push_back(pc);
      }
    }
  }
  return out;
}

void Boundary::classify(const ConvexCone& cone, double rel_tol) {
  const double tol = rel_tol * std::max(1.0, scale);
  for (Piece& p : pieces) {
    const Curve& c = curves[p.curve];
    std::vector<Vec> pts;
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) pts.push_back(Vec(p.point(c, s)));
    p.on_cone = cone.common_facet(pts, tol) >= 0;
  }
}

double Boundary::area() const {
  double total = 0.0;
  for (const Piece& p : pieces) {
    if (!p.arc) {
      total += 0.5 * cross(p.a, p.b);
      continue;
    }
    const Curve& c = curves[p.curve];
    const Vec2 du = unit_circle(p.t1) - unit_circle(p.t0);
    total += 0.5 * (cross(c.center, c.S * du) + c.S.determinant() * (p.t1 - p.t0));
  }
  return total;
}

double Boundary::length(bool skip_on_cone) const {
  double total = 0.0;
  for (const Piece& p : pieces)
    if (!(skip_on_cone && p.on_cone)) total += p.length;
  return total;
}

double Boundary::integrate(const std::function<double(const Vec2&, const Vec2&)>& f, bool skip_on_cone) const {
  double total = 0.0;
  for (const Piece& p : pieces) {
    if (skip_on_cone && p.on_cone) continue;
    const Curve& c = curves[p.curve];
    total += conestab::integrate(
        [&](double s) { return f(p.point(c, s), p.outward_normal(c, s)) * p.speed(c, s); }, 0.0, 1.0, 1e-13,
        1e-12, 30);
  }
  return total;
}

Vec2 Boundary::centroid() const {
  const double a = area();
  const double mx = integrate([](const Vec2& x, const Vec2& n) { return 0.5 * x.x() * x.x() * n.x(); });
  const double my = integrate([](const Vec2& x, const Vec2& n) { return 0.5 * x.y() * x.y() * n.y(); });
  return {mx / a, my / a};
}

}  // namespace conestab::planar
