#include "conestab/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conestab/polytope.hpp"

namespace conestab {

Box Box::empty(int n) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Vec::Constant(n, inf), Vec::Constant(n, -inf)};
}

Box Box::infinite(int n) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Vec::Constant(n, -inf), Vec::Constant(n, inf)};
}

Box Box::hull(const Box& o) const { return {lo.cwiseMin(o.lo), hi.cwiseMax(o.hi)}; }

Box Box::meet(const Box& o) const { return {lo.cwiseMax(o.lo), hi.cwiseMin(o.hi)}; }

Ellipsoid Ellipsoid::make(Vec center, Mat shape) {
  Eigen::FullPivLU<Mat> lu(shape);
  if (lu.rank() < shape.rows()) throw GeometryError("ellipsoid shape must be invertible");
  Ellipsoid e;
  e.center = std::move(center);
  e.inverse = lu.inverse();
  e.shape = std::move(shape);
  return e;
}

bool Ellipsoid::is_ball(double* radius) const {
  const Mat g = shape * shape.transpose();
  const double r2 = g.trace() / static_cast<double>(g.rows());
  if ((g - r2 * Mat::Identity(g.rows(), g.cols())).norm() > 1e-12 * r2) return false;
  if (radius) *radius = std::sqrt(r2);
  return true;
}

bool ConvexPiece::contains(const Vec& x) const {
  if (A.rows() > 0 && ((A * x - b).array() >= 0.0).any()) return false;
  if (ellipsoid && (ellipsoid->inverse * (x - ellipsoid->center)).squaredNorm() >= 1.0) return false;
  if (soc) {
    const Vec z = x - soc->apex;
    if (!(soc->g.dot(z) > (soc->G * z).norm())) return false;
  }
  return true;
}

double ConvexPiece::margin(const Vec& x) const {
  double m = std::numeric_limits<double>::infinity();
  if (A.rows() > 0) m = (b - A * x).minCoeff();
  if (ellipsoid) {
    // Distance-like slack: exact for balls.
    double r = 1.0;
    const double q = (ellipsoid->inverse * (x - ellipsoid->center)).norm();
    if (ellipsoid->is_ball(&r)) {
      m = std::min(m, r * (1.0 - q));
    } else {
      m = std::min(m, (1.0 - q) / ellipsoid->inverse.norm());
    }
  }
  if (soc) {
    const Vec z = x - soc->apex;
    const double scale = std::sqrt(soc->g.squaredNorm() + soc->G.squaredNorm());
    m = std::min(m, (soc->g.dot(z) - (soc->G * z).norm()) / scale);
  }
  return m;
}

ConvexPiece ConvexPiece::affine(const Mat& L, const Vec& t) const {
  Eigen::FullPivLU<Mat> lu(L);
  if (lu.rank() < L.rows()) throw GeometryError("affine image needs an invertible matrix");
  const Mat Linv = lu.inverse();
  ConvexPiece out;
  out.A = A * Linv;
  out.b = b + out.A * t;
  for (Eigen::Index i = 0; i < out.A.rows(); ++i) {
    const double len = out.A.row(i).norm();
    out.A.row(i) /= len;
    out.b[i] /= len;
  }
  if (ellipsoid) out.ellipsoid = Ellipsoid::make(L * ellipsoid->center + t, L * ellipsoid->shape);
  if (soc) out.soc = SecondOrderCone{L * soc->apex + t, Linv.transpose() * soc->g, soc->G * Linv};
  if (sector) {
    const double c = L(0, 0);
    if (c > 0.0 && (L - c * Mat::Identity(L.rows(), L.cols())).norm() < 1e-14 * c)
      out.sector = SectorTag{sector->cone, c * sector->radius, L * sector->center + t};
  }
  return out;
}

Box ConvexPiece::bounding_box() const {
  const int n = dim();
  Box box = Box::infinite(n);
  if (ellipsoid) {
    // Tight box of ellipsoid n halfspaces in the unit-ball coordinates u.
    const Mat As = A * ellipsoid->shape;
    const Vec bs = b - A * ellipsoid->center;
    for (int j = 0; j < n; ++j) {
      const Vec dir = ellipsoid->shape.row(j).transpose();
      const double hi = ball_halfspace_support(dir, As, bs);
      const double lo = -ball_halfspace_support(-dir, As, bs);
      if (!std::isfinite(hi) || !std::isfinite(lo)) return Box::empty(n);
      box.lo[j] = ellipsoid->center[j] + lo;
      box.hi[j] = ellipsoid->center[j] + hi;
    }
    return box;
  }
  if (A.rows() > 0 && polyhedron_is_bounded(A)) {
    const auto verts = polytope_vertices(A, b);
    if (verts.empty()) return Box::empty(n);
    Box pb = Box::empty(n);
    for (const Vec& v : verts) pb = pb.hull(Box{v, v});
    box = box.meet(pb);
  }
  return box;
}

void append_cone_constraints(ConvexPiece& piece, const ConvexCone& cone, const Vec& apex) {
  const int n = cone.dim();
  if (cone.kind() == ConvexCone::Kind::Circular) {
    const Vec& a = cone.axis();
    piece.soc = SecondOrderCone{apex, std::tan(cone.half_angle()) * a, Mat::Identity(n, n) - a * a.transpose()};
    return;
  }
  const Mat& N = cone.normals();
  const Eigen::Index m0 = piece.A.rows();
  Mat A(m0 + N.rows(), n);
  Vec b(m0 + N.rows());
  A.topRows(m0) = piece.A;
  b.head(m0) = piece.b;
  A.bottomRows(N.rows()) = -N;
  b.tail(N.rows()) = -N * apex;
  piece.A = std::move(A);
  piece.b = std::move(b);
}

struct Region::Node {
  Op op = Op::Leaf;
  std::string kind;
  int dim = 0;
  int depth = 0;
  std::optional<ConvexPiece> piece;
  std::vector<std::shared_ptr<const Node>> kids;
  std::vector<ConvexPiece> leaves;
};

Region::Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Region::Region(ConvexPiece piece, std::string kind) {
  auto node = std::make_shared<Node>();
  node->op = Op::Leaf;
  node->kind = std::move(kind);
  node->dim = piece.dim();
  node->depth = 0;
  node->leaves.push_back(piece);
  node->piece = std::move(piece);
  node_ = std::move(node);
}

namespace {

ConvexPiece empty_constraints(int n) {
  ConvexPiece p;
  p.A = Mat(0, n);
  p.b = Vec(0);
  return p;
}

}  // namespace

Region Region::polytope(const Mat& A, const Vec& b) {
  if (A.rows() != b.size()) throw GeometryError("polytope: A and b sizes differ");
  ConvexPiece p;
  p.A = A;
  p.b = b;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double len = A.row(i).norm();
    if (!(len > 0.0)) throw GeometryError("polytope: zero constraint row");
    p.A.row(i) /= len;
    p.b[i] /= len;
  }
  return Region(std::move(p), "polytope");
}

Region Region::box(const Vec& lo, const Vec& hi) {
  const Eigen::Index n = lo.size();
  Mat A(2 * n, n);
  Vec b(2 * n);
  A.topRows(n) = Mat::Identity(n, n);
  A.bottomRows(n) = -Mat::Identity(n, n);
  b.head(n) = hi;
  b.tail(n) = -lo;
  return polytope(A, b);
}

Region Region::ball(const Vec& center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("ball radius must be positive");
  ConvexPiece p = empty_constraints(static_cast<int>(center.size()));
  p.ellipsoid = Ellipsoid::ball(center, radius);
  return Region(std::move(p), "ball");
}

Region Region::ellipsoid(const Vec& center, const Mat& shape) {
  ConvexPiece p = empty_constraints(static_cast<int>(center.size()));
  p.ellipsoid = Ellipsoid::make(center, shape);
  return Region(std::move(p), "ellipsoid");
}

Region Region::half_ball(const Vec& center, double radius, const Vec& inward) {
  if (!(radius > 0.0)) throw GeometryError("half-ball radius must be positive");
  const Vec m = inward.normalized();
  ConvexPiece p;
  p.A = -m.transpose();
  p.b = Vec::Constant(1, -m.dot(center));
  p.ellipsoid = Ellipsoid::ball(center, radius);
  return Region(std::move(p), "half_ball");
}

Region Region::spherical_sector(const ConvexCone& cone, double radius, const Vec& center) {
  if (!(radius > 0.0)) throw GeometryError("sector radius must be positive");
  if (center.size() != cone.dim()) throw GeometryError("sector center has wrong dimension");
  ConvexPiece p = empty_constraints(cone.dim());
  p.ellipsoid = Ellipsoid::ball(center, radius);
  append_cone_constraints(p, cone, center);
  p.sector = SectorTag{std::make_shared<const ConvexCone>(cone), radius, center};
  return Region(std::move(p), "spherical_sector");
}

Region Region::ellipsoid_sector(const ConvexCone& cone, const Vec& center, const Mat& shape) {
  ConvexPiece p = empty_constraints(cone.dim());
  p.ellipsoid = Ellipsoid::make(center, shape);
  append_cone_constraints(p, cone, Vec::Zero(cone.dim()));
  return Region(std::move(p), "ellipsoid_sector");
}

Region Region::unite(const Region& a, const Region& b) {
  auto node = std::make_shared<Node>();
  node->op = Op::Union;
  node->kind = "boolean";
  node->dim = a.dim();
  node->kids = {a.node_, b.node_};
  node->depth = 1 + std::max(a.depth(), b.depth());
  if (a.dim() != b.dim()) throw GeometryError("boolean operands differ in dimension");
  if (node->depth > kMaxDepth) throw GeometryError("boolean combination deeper than 8");
  node->leaves = a.leaves();
  node->leaves.insert(node->leaves.end(), b.leaves().begin(), b.leaves().end());
  return Region(std::shared_ptr<const Node>(node));
}

Region Region::intersect(const Region& a, const Region& b) {
  Region r = unite(a, b);
  auto node = std::make_shared<Node>(*r.node_);
  node->op = Op::Intersection;
  return Region(std::shared_ptr<const Node>(node));
}

Region Region::subtract(const Region& a, const Region& b) {
  Region r = unite(a, b);
  auto node = std::make_shared<Node>(*r.node_);
  node->op = Op::Difference;
  return Region(std::shared_ptr<const Node>(node));
}

Region Region::affine(const Mat& L, const Vec& t) const {
  if (L.rows() != dim() || L.cols() != dim() || t.size() != dim())
    throw GeometryError("affine map has wrong dimension");
  if (node_->op == Op::Leaf) {
    Region r(node_->piece->affine(L, t), node_->kind);
    return r;
  }
  auto node = std::make_shared<Node>(*node_);
  node->leaves.clear();
  for (auto& kid : node->kids) {
    Region k = Region(kid).affine(L, t);
    node->leaves.insert(node->leaves.end(), k.leaves().begin(), k.leaves().end());
    kid = k.node_;
  }
  return Region(std::shared_ptr<const Node>(node));
}

Region Region::translated(const Vec& t) const { return affine(Mat::Identity(dim(), dim()), t); }

Region Region::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw GeometryError("scale factor must be positive");
  return affine(lambda * Mat::Identity(dim(), dim()), Vec::Zero(dim()));
}

Region Region::clipped_to(const ConvexCone& cone) const {
  if (node_->op == Op::Leaf) {
    ConvexPiece p = *node_->piece;
    if (cone.kind() == ConvexCone::Kind::Circular && p.soc) {
      ConvexPiece c = empty_constraints(cone.dim());
      append_cone_constraints(c, cone, Vec::Zero(cone.dim()));
      return intersect(*this, Region(std::move(c), "cone"));
    }
    append_cone_constraints(p, cone, Vec::Zero(cone.dim()));
    p.sector.reset();
    return Region(std::move(p), node_->kind);
  }
  ConvexPiece c = empty_constraints(cone.dim());
  append_cone_constraints(c, cone, Vec::Zero(cone.dim()));
  return intersect(*this, Region(std::move(c), "cone"));
}

int Region::dim() const { return node_->dim; }
Region::Op Region::op() const { return node_->op; }
int Region::depth() const { return node_->depth; }
const std::string& Region::kind() const { return node_->kind; }
const std::vector<ConvexPiece>& Region::leaves() const { return node_->leaves; }

const ConvexPiece& Region::piece() const {
  if (node_->op != Op::Leaf) throw GeometryError("region is not a single convex piece");
  return *node_->piece;
}

std::vector<Region> Region::children() const {
  std::vector<Region> out;
  for (const auto& k : node_->kids) out.push_back(Region(k));
  return out;
}

bool Region::contains(const Vec& x) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Leaf:
      return n.piece->contains(x);
    case Op::Union:
      return Region(n.kids[0]).contains(x) || Region(n.kids[1]).contains(x);
    case Op::Intersection:
      return Region(n.kids[0]).contains(x) && Region(n.kids[1]).contains(x);
    case Op::Difference:
      return Region(n.kids[0]).contains(x) && !Region(n.kids[1]).contains(x);
  }
  return false;
}

Box Region::bounding_box() const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Leaf:
      return n.piece->bounding_box();
    case Op::Union:
      return Region(n.kids[0]).bounding_box().hull(Region(n.kids[1]).bounding_box());
    case Op::Intersection:
      return Region(n.kids[0]).bounding_box().meet(Region(n.kids[1]).bounding_box());
    case Op::Difference:
      return Region(n.kids[0]).bounding_box();
  }
  return Box::infinite(n.dim);
}

}  // namespace conestab
