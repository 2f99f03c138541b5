#include "conestab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "conestab/planar.hpp"
#include "conestab/polytope.hpp"
#include "conestab/rng.hpp"

namespace conestab {

namespace {

Box finite_box(const Region& region) {
  const Box box = region.bounding_box();
  if (!box.is_empty() && !box.finite()) throw GeometryError("region is unbounded");
  return box;
}

// ---- exact volumes -------------------------------------------------------

using Indicator = std::map<std::vector<int>, double>;

Indicator product(const Indicator& a, const Indicator& b) {
  Indicator out;
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      std::vector<int> k;
      std::set_union(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(k));
      out[k] += ca * cb;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

Indicator combine(const Indicator& a, const Indicator& b, double sb) {
  Indicator out = a;
  for (const auto& [k, c] : b) out[k] += sb * c;
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

// Indicator of a boolean tree as a signed sum of leaf intersections.
Indicator expand(const Region& r, int& next_leaf) {
  if (r.is_single_piece()) return {{{next_leaf++}, 1.0}};
  const auto kids = r.children();
  const Indicator a = expand(kids[0], next_leaf);
  const Indicator b = expand(kids[1], next_leaf);
  const Indicator ab = product(a, b);
  switch (r.op()) {
    case Region::Op::Union:
      return combine(combine(a, b, 1.0), ab, -1.0);
    case Region::Op::Intersection:
      return ab;
    case Region::Op::Difference:
      return combine(a, ab, -1.0);
    case Region::Op::Leaf:
      break;
  }
  return {};
}

std::optional<double> polytope_volume(const Mat& A, const Vec& b) {
  const int n = static_cast<int>(A.cols());
  if (n != 3) return std::nullopt;
  if (!polyhedron_is_bounded(A)) return std::nullopt;
  const auto facets = polytope_facets_3d(A, b);
  if (facets.empty()) return 0.0;
  return polytope_volume_3d(facets);
}

std::optional<double> polytope_tree_volume(const Region& region) {
  if (region.dim() != 3) return std::nullopt;
  for (const ConvexPiece& p : region.leaves())
    if (!p.is_polytope()) return std::nullopt;
  int next = 0;
  const Indicator ind = expand(region, next);
  const auto& leaves = region.leaves();
  double total = 0.0;
  for (const auto& [key, coeff] : ind) {
    Eigen::Index rows = 0;
    for (int i : key) rows += leaves[i].A.rows();
    Mat A(rows, 3);
    Vec b(rows);
    Eigen::Index at = 0;
    for (int i : key) {
      A.middleRows(at, leaves[i].A.rows()) = leaves[i].A;
      b.segment(at, leaves[i].A.rows()) = leaves[i].b;
      at += leaves[i].A.rows();
    }
    const auto v = polytope_volume(A, b);
    if (!v) return std::nullopt;
    total += coeff * *v;
  }
  return total;
}

const SectorTag* sector_tag(const Region& region) {
  if (!region.is_single_piece()) return nullptr;
  const ConvexPiece& p = region.piece();
  return p.sector ? &*p.sector : nullptr;
}

std::optional<Estimate> exact_volume(const Region& region) {
  if (planar::supported(region)) return Estimate::closed(planar::Boundary::of(region).area());
  if (const SectorTag* t = sector_tag(region))
    return std::pow(t->radius, region.dim()) * t->cone->unit_sector_volume();
  if (const auto v = polytope_tree_volume(region)) return Estimate::closed(*v);
  return std::nullopt;
}

Estimate monte_carlo_volume(const Region& region, const MeasureOptions& options) {
  const Box box = finite_box(region);
  if (box.is_empty()) return Estimate::closed(0.0);
  CounterRng rng(options.seed, 0x766F6C);
  long hits = 0;
  const long n = std::max(1L, options.interior_samples);
  for (long i = 0; i < n; ++i)
    if (region.contains(rng.uniform_in_box(box.lo, box.hi))) ++hits;
  const double p = static_cast<double>(hits) / n;
  const double v = box.volume();
  return Estimate::sampled(v * p, v * std::sqrt(p * (1.0 - p) / n));
}

// ---- boundary sampling ---------------------------------------------------

struct SampleBuilder {
  SurfaceSample s;
  int next_group = 0;

  int open_group(long draws) {
    s.draws.push_back(draws);
    return next_group++;
  }
  void add(const Vec& x, const Vec& nu, double w, bool flag, int g) {
    s.points.push_back(x);
    s.normals.push_back(nu);
    s.weights.push_back(w);
    s.on_cone.push_back(flag);
    s.group.push_back(g);
  }
};

// Orthonormal basis of the complement of a unit vector, as columns.
Mat complement_basis(const Vec& a) {
  const int n = static_cast<int>(a.size());
  Mat M = Mat::Identity(n, n) - a * a.transpose();
  Eigen::ColPivHouseholderQR<Mat> qr(M);
  Mat Q = qr.householderQ();
  return Q.leftCols(n - 1);
}

long share(long total, double part, double whole) {
  return std::max(2L, static_cast<long>(std::llround(total * part / std::max(whole, 1e-300))));
}

void planar_samples(const Region& region, const ConvexCone& cone, long count, SampleBuilder& out) {
  planar::Boundary bd = planar::Boundary::of(region);
  bd.classify(cone);
  const double L = bd.length();
  for (const planar::Piece& p : bd.pieces) {
    const planar::Curve& c = bd.curves[p.curve];
    const long m = share(count, p.length, L);
    std::vector<double> speed(m);
    double ssum = 0.0;
    for (long j = 0; j < m; ++j) ssum += speed[j] = p.speed(c, (j + 0.5) / m);
    const int g = out.open_group(m);
    for (long j = 0; j < m; ++j) {
      const double s = (j + 0.5) / m;
      out.add(Vec(p.point(c, s)), Vec(p.outward_normal(c, s)), p.length * speed[j] / ssum, p.on_cone, g);
    }
  }
}

Vec random_in_triangle(CounterRng& rng, const Vec& a, const Vec& b, const Vec& c) {
  double u = rng.uniform(), v = rng.uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return a + u * (b - a) + v * (c - a);
}

void polytope_samples(const ConvexPiece& piece, const ConvexCone& cone, long count, std::uint64_t seed,
                      double tol, SampleBuilder& out) {
  const auto facets = polytope_facets_3d(piece.A, piece.b);
  double total = 0.0;
  for (const Facet3& f : facets) total += f.area;
  CounterRng rng(seed, 0x706F6C79);
  for (const Facet3& f : facets) {
    std::vector<Vec> verts;
    for (const auto& v : f.vertices) verts.push_back(Vec(v));
    const bool flag = cone.common_facet(verts, tol) >= 0;
    std::vector<double> cum;
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < verts.size(); ++i) {
      acc += 0.5 * (verts[i] - verts[0]).head<3>().cross((verts[i + 1] - verts[0]).head<3>()).norm();
      cum.push_back(acc);
    }
    const long m = share(count, f.area, total);
    const int g = out.open_group(m);
    for (long j = 0; j < m; ++j) {
      const double pick = rng.uniform() * acc;
      std::size_t t = std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin();
      t = std::min(t, cum.size() - 1);
      out.add(random_in_triangle(rng, verts[0], verts[t + 1], verts[t + 2]), Vec(f.normal), f.area / m, flag, g);
    }
  }
}

void sector_samples(const SectorTag& tag, const ConvexCone& cone, long count, std::uint64_t seed, double tol,
                    SampleBuilder& out) {
  const ConvexCone& C = *tag.cone;
  const int n = C.dim();
  const double r = tag.radius;
  const Vec& c = tag.center;
  CounterRng rng(seed, 0x73656374);

  struct Flat {
    double area;
    std::function<void(long, int)> emit;
  };
  std::vector<Flat> flats;
  if (C.kind() == ConvexCone::Kind::Circular) {
    const double phi = C.half_angle();
    const Vec a = C.axis();
    const Mat E = complement_basis(a);
    const double area = 2.0 * kPi * std::sin(phi) * r * r / 2.0;
    flats.push_back({area, [&, phi, a, E, area](long m, int g) {
                       for (long j = 0; j < m; ++j) {
                         const double t = r * std::sqrt(rng.uniform());
                         const double psi = 2.0 * kPi * rng.uniform();
                         const Vec w = std::cos(psi) * E.col(0) + std::sin(psi) * E.col(1);
                         const Vec x = c + t * (std::cos(phi) * a + std::sin(phi) * w);
                         const Vec nu = std::cos(phi) * w - std::sin(phi) * a;
                         out.add(x, nu, area / m, cone.on_boundary(x, tol), g);
                       }
                     }});
  } else {
    const Mat& N = C.normals();
    for (Eigen::Index i = 0; i < N.rows(); ++i) {
      const Vec ni = N.row(i).transpose();
      const Mat E = complement_basis(ni);
      ConvexPiece slice;
      std::vector<Vec> rows;
      for (Eigen::Index j = 0; j < N.rows(); ++j) {
        if (j == i) continue;
        const Vec q = E.transpose() * N.row(j).transpose();
        if (q.norm() > 1e-12) rows.push_back(-q.normalized());
      }
      slice.A = Mat(static_cast<Eigen::Index>(rows.size()), 2);
      slice.b = Vec::Zero(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t j = 0; j < rows.size(); ++j) slice.A.row(static_cast<Eigen::Index>(j)) = rows[j].transpose();
      slice.ellipsoid = Ellipsoid::ball(Vec::Zero(2), r);
      const Region face(slice);
      const double area = planar::Boundary::of(face).area();
      if (!(area > 0.0)) continue;
      flats.push_back({area, [&, face, E, ni, area](long m, int g) {
                         long got = 0;
                         while (got < m) {
                           const Vec u(Vec2(rng.uniform(-r, r), rng.uniform(-r, r)));
                           if (!face.contains(u)) continue;
                           out.add(c + E * u, -ni, area / m, true, g);
                           ++got;
                         }
                       }});
    }
  }
  const double cap = r * r * C.solid_angle().value;
  double total = cap;
  for (const Flat& f : flats) total += f.area;
  const long mc = share(count, cap, total);
  const int gc = out.open_group(mc);
  for (long got = 0; got < mc;) {
    const Vec u = rng.unit_vector(n);
    if (!C.contains_closure(u, 0.0)) continue;
    out.add(c + r * u, u, cap / mc, false, gc);
    ++got;
  }
  for (const Flat& f : flats) {
    const long m = share(count, f.area, total);
    f.emit(m, out.open_group(m));
  }
}

// One constraint surface of a leaf, sampled with known area density.
struct Surface {
  enum Kind { Plane, Ellipsoid, Cone } kind = Plane;
  Vec a;
  double beta = 0.0;
  conestab::Ellipsoid ell;
  Vec apex;
  Vec axis;
  double phi = 0.0;
};

bool same_surface(const Surface& s, const Surface& t) {
  if (s.kind != t.kind) return false;
  switch (s.kind) {
    case Surface::Plane:
      return ((s.a - t.a).norm() < 1e-12 && std::abs(s.beta - t.beta) < 1e-12) ||
             ((s.a + t.a).norm() < 1e-12 && std::abs(s.beta + t.beta) < 1e-12);
    case Surface::Ellipsoid:
      return (s.ell.center - t.ell.center).norm() < 1e-12 &&
             (s.ell.shape * s.ell.shape.transpose() - t.ell.shape * t.ell.shape.transpose()).norm() < 1e-12;
    case Surface::Cone:
      return (s.apex - t.apex).norm() < 1e-12 && (s.axis - t.axis).norm() < 1e-12 && std::abs(s.phi - t.phi) < 1e-12;
  }
  return false;
}

void monte_carlo_samples(const Region& region, const ConvexCone& cone, long count, std::uint64_t seed, double tol,
                         SampleBuilder& out) {
  const int n = region.dim();
  const Box box = finite_box(region);
  if (box.is_empty()) return;
  std::vector<Surface> surfaces;
  auto push = [&](const Surface& s) {
    for (const Surface& t : surfaces)
      if (same_surface(s, t)) return;
    surfaces.push_back(s);
  };
  for (const ConvexPiece& p : region.leaves()) {
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
      Surface s;
      s.kind = Surface::Plane;
      s.a = p.A.row(i).transpose();
      s.beta = p.b[i];
      push(s);
    }
    if (p.ellipsoid) {
      Surface s;
      s.kind = Surface::Ellipsoid;
      s.ell = *p.ellipsoid;
      push(s);
    }
    if (p.soc) {
      const double gn = p.soc->g.norm();
      Surface s;
      s.kind = Surface::Cone;
      s.apex = p.soc->apex;
      s.axis = p.soc->g / gn;
      s.phi = std::atan(gn);
      const Mat G = Mat::Identity(n, n) - s.axis * s.axis.transpose();
      if ((G - p.soc->G).norm() > 1e-10) throw GeometryError("only circular second-order constraints can be sampled");
      push(s);
    }
  }
  if (surfaces.empty()) return;
  const double eps = 1e-9 * std::max(1e-300, box.diagonal());
  const long per = std::max(2L, count / static_cast<long>(surfaces.size()));
  CounterRng rng(seed, 0x6D63);
  std::vector<Vec> corners;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec v(n);
    for (int k = 0; k < n; ++k) v[k] = (mask >> k & 1) ? box.hi[k] : box.lo[k];
    corners.push_back(v);
  }

  for (const Surface& s : surfaces) {
    const int g = out.open_group(per);
    auto test = [&](const Vec& x, const Vec& nu, double w) {
      const bool inner = region.contains(x - eps * nu);
      const bool outer = region.contains(x + eps * nu);
      if (inner == outer) return;
      out.add(x, inner ? nu : Vec(-nu), w, cone.on_boundary(x, tol), g);
    };
    if (s.kind == Surface::Plane) {
      const Mat E = complement_basis(s.a);
      const Vec p0 = s.beta * s.a;
      Vec lo = Vec::Constant(n - 1, std::numeric_limits<double>::infinity()), hi = -lo;
      for (const Vec& v : corners) {
        const Vec q = E.transpose() * (v - p0);
        lo = lo.cwiseMin(q);
        hi = hi.cwiseMax(q);
      }
      const double area = (hi - lo).prod();
      for (long j = 0; j < per; ++j) test(p0 + E * rng.uniform_in_box(lo, hi), s.a, area / per);
    } else if (s.kind == Surface::Ellipsoid) {
      const double sphere = unit_sphere_area(n);
      const double det = std::abs(s.ell.shape.determinant());
      const Mat SinvT = s.ell.inverse.transpose();
      for (long j = 0; j < per; ++j) {
        const Vec u = rng.unit_vector(n);
        const Vec g_ = SinvT * u;
        test(s.ell.center + s.ell.shape * u, g_.normalized(), sphere * det * g_.norm() / per);
      }
    } else {
      double T = 0.0;
      for (const Vec& v : corners) T = std::max(T, (v - s.apex).norm());
      const Mat E = complement_basis(s.axis);
      const double lateral = std::pow(std::sin(s.phi), n - 2) * unit_sphere_area(n - 1) * std::pow(T, n - 1) / (n - 1);
      for (long j = 0; j < per; ++j) {
        const double t = T * std::pow(rng.uniform(), 1.0 / (n - 1));
        const Vec w = E * rng.unit_vector(n - 1);
        const Vec x = s.apex + t * (std::cos(s.phi) * s.axis + std::sin(s.phi) * w);
        test(x, std::cos(s.phi) * w - std::sin(s.phi) * s.axis, lateral / per);
      }
    }
  }
  out.s.exact = false;
}

}  // namespace

double SurfaceSample::total_weight(bool on_cone_part) const {
  double t = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    if (on_cone[i] == on_cone_part) t += weights[i];
  return t;
}

Estimate SurfaceSample::sum(const std::function<double(std::size_t)>& f,
                            const std::function<bool(std::size_t)>& keep) const {
  std::vector<double> s1(draws.size(), 0.0), s2(draws.size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    if (!keep(i)) continue;
    const double v = weights[i] * f(i);
    s1[group[i]] += v;
    s2[group[i]] += v * v;
  }
  double value = 0.0, var = 0.0;
  for (std::size_t g = 0; g < draws.size(); ++g) {
    const double N = static_cast<double>(draws[g]);
    value += s1[g];
    // Differences at the rounding level of N s2 come from constant integrands.
    const double diff = N * s2[g] - s1[g] * s1[g];
    if (N > 1 && diff > 1e-13 * N * s2[g]) var += diff / (N - 1.0);
  }
  const double se = std::sqrt(var);
  const double rel = 1e-12 * std::max(1.0, std::abs(value));
  if (exact && se <= rel) return Estimate::closed(value);
  return Estimate::sampled(value, se);
}

SurfaceSample sample_boundary(const Region& region, const ConvexCone& cone, long count, std::uint64_t seed) {
  if (count < 1) throw GeometryError("count must be positive");
  if (cone.dim() != region.dim()) throw GeometryError("region and cone differ in dimension");
  SampleBuilder b;
  const Box box = finite_box(region);
  const double tol = 1e-9 * std::max(1.0, box.is_empty() ? 1.0 : box.diagonal());
  if (planar::supported(region)) {
    planar_samples(region, cone, count, b);
  } else if (region.dim() == 3 && region.is_single_piece() && region.piece().is_polytope() &&
             polyhedron_is_bounded(region.piece().A)) {
    polytope_samples(region.piece(), cone, count, seed, tol, b);
  } else if (const SectorTag* t = sector_tag(region); t && region.dim() == 3) {
    sector_samples(*t, cone, count, seed, tol, b);
  } else {
    monte_carlo_samples(region, cone, count, seed, tol, b);
  }
  return std::move(b.s);
}

Estimate volume(const Region& region, const MeasureOptions& options) {
  if (const auto v = exact_volume(region)) return *v;
  return monte_carlo_volume(region, options);
}

Estimate boundary_integral(const Region& region, const ConvexCone& cone,
                           const std::function<double(const Vec&, const Vec&)>& f, bool skip_on_cone,
                           const MeasureOptions& options) {
  if (planar::supported(region)) {
    planar::Boundary bd = planar::Boundary::of(region);
    bd.classify(cone);
    return Estimate::closed(bd.integrate([&](const Vec2& x, const Vec2& nu) { return f(Vec(x), Vec(nu)); },
                                         skip_on_cone));
  }
  const SurfaceSample s = sample_boundary(region, cone, options.boundary_samples, options.seed);
  return s.sum([&](std::size_t i) { return f(s.points[i], s.normals[i]); },
               [&](std::size_t i) { return !(skip_on_cone && s.on_cone[i]); });
}

Estimate relative_perimeter(const Region& region, const ConvexCone& cone, const MeasureOptions& options) {
  if (planar::supported(region)) {
    planar::Boundary bd = planar::Boundary::of(region);
    bd.classify(cone);
    return Estimate::closed(bd.length(true));
  }
  if (const SectorTag* t = sector_tag(region); t && t->cone->dim() == cone.dim()) {
    // The flat sides of a sector lie on the cone boundary when the cones agree
    // and the apex sits at the origin.
    if (t->center.norm() == 0.0 && (t->cone->normals() - cone.normals()).norm() == 0.0 &&
        t->cone->kind() == cone.kind() && t->cone->half_angle() == cone.half_angle())
      return std::pow(t->radius, region.dim() - 1) * cone.solid_angle();
  }
  return boundary_integral(region, cone, [](const Vec&, const Vec&) { return 1.0; }, true, options);
}

Estimate boundary_measure(const Region& region, const ConvexCone& cone, const MeasureOptions& options) {
  return boundary_integral(region, cone, [](const Vec&, const Vec&) { return 1.0; }, false, options);
}

Estimate intersection_volume(const Region& a, const Region& b, const MeasureOptions& options) {
  return volume(Region::intersect(a, b), options);
}

Estimate symmetric_difference_volume(const Region& a, const Region& b, const MeasureOptions& options) {
  if (a.dim() != b.dim()) throw GeometryError("regions differ in dimension");
  const Region both = Region::intersect(a, b);
  const auto va = exact_volume(a), vb = exact_volume(b), vab = exact_volume(both);
  if (va && vb && vab) return *va + *vb - 2.0 * *vab;
  const Box box = finite_box(a).hull(finite_box(b));
  CounterRng rng(options.seed, 0x73796D);
  const long n = std::max(1L, options.interior_samples);
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    const Vec x = rng.uniform_in_box(box.lo, box.hi);
    if (a.contains(x) != b.contains(x)) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  const double v = box.volume();
  return Estimate::sampled(v * p, v * std::sqrt(p * (1.0 - p) / n));
}

Vec centroid(const Region& region, const MeasureOptions& options) {
  if (planar::supported(region)) return Vec(planar::Boundary::of(region).centroid());
  const InteriorSample s = sample_interior(region, 20000, options.seed, true);
  Vec m = Vec::Zero(region.dim());
  for (const Vec& p : s.points) m += p;
  return m / static_cast<double>(s.points.size());
}

InteriorSample sample_interior(const Region& region, long count, std::uint64_t seed, bool low_discrepancy) {
  if (count < 1) throw GeometryError("count must be positive");
  const Box box = finite_box(region);
  if (box.is_empty()) throw GeometryError("degenerate region: empty bounding box");
  InteriorSample out;
  out.points.reserve(static_cast<std::size_t>(count));
  CounterRng rng(seed, 0x696E74);
  std::optional<HaltonSequence> halton;
  if (low_discrepancy) halton.emplace(region.dim(), seed);
  long trials = 0;
  while (static_cast<long>(out.points.size()) < count) {
    const Vec x = halton ? halton->next_in_box(box.lo, box.hi) : rng.uniform_in_box(box.lo, box.hi);
    ++trials;
    if (region.contains(x)) out.points.push_back(x);
    if (trials >= 100000 && static_cast<double>(out.points.size()) < 1e-4 * trials)
      throw GeometryError("degenerate region: acceptance rate below 1e-4");
  }
  out.acceptance = static_cast<double>(count) / trials;
  return out;
}

void validate_in_cone(const Region& region, const ConvexCone& cone, long samples, std::uint64_t seed) {
  const Box box = finite_box(region);
  const double tol = 1e-9 * std::max(1.0, box.diagonal());
  for (const Vec& x : sample_interior(region, samples, seed).points)
    if (!cone.contains_closure(x, tol)) throw GeometryError("region leaves the cone");
}

}  // namespace conestab
