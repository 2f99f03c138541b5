#include "conestab/cone.hpp"

#include <algorithm>
#include <cmath>

#include "conestab/numerics.hpp"
#include "conestab/rng.hpp"

namespace conestab {

namespace {

// Solid angle of the spherical triangle spanned by three unit vectors.
double triangle_solid_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                            const Eigen::Vector3d& c) {
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

void for_each_subset(int m, int r, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  if (r > m) return;
  for (;;) {
    fn(idx);
    int i = r - 1;
    while (i >= 0 && idx[i] == m - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

ConvexCone ConvexCone::polyhedral(const Mat& normals, std::optional<Vec> axis) {
  ConvexCone c;
  c.kind_ = Kind::Polyhedral;
  c.dim_ = static_cast<int>(normals.cols());
  if (c.dim_ < 1) throw GeometryError("cone dimension must be positive");
  c.normals_ = normals;
  for (Eigen::Index i = 0; i < c.normals_.rows(); ++i) {
    const double len = c.normals_.row(i).norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw GeometryError("cone normal must be nonzero");
    c.normals_.row(i) /= len;
  }
  if (c.normals_.rows() > 0) {
    if (!least_distance(c.normals_, Vec::Ones(c.normals_.rows())))
      throw GeometryError("degenerate cone: empty interior");
  }
  c.user_axis_ = axis.has_value();
  c.build_frame(std::move(axis));
  c.compute_solid_angle();
  return c;
}

ConvexCone ConvexCone::circular(const Vec& axis, double half_angle) {
  if (!(half_angle > 0.0 && half_angle < kPi / 2))
    throw GeometryError("circular cone half-angle must lie in (0, pi/2)");
  const double len = axis.norm();
  if (!(len > 0.0)) throw GeometryError("circular cone axis must be nonzero");
  const Vec a = axis / len;
  if (axis.size() == 2) {
    // In the plane a circular cone is a symmetric wedge.
    const Vec2 a2(a[0], a[1]);
    const double c = std::cos(half_angle), s = std::sin(half_angle);
    const Vec2 rays[2] = {Vec2(c * a2.x() - s * a2.y(), s * a2.x() + c * a2.y()),
                          Vec2(c * a2.x() + s * a2.y(), -s * a2.x() + c * a2.y())};
    Mat n(2, 2);
    for (int i = 0; i < 2; ++i) n.row(i) = (a2 - a2.dot(rays[i]) * rays[i]).normalized().transpose();
    return polyhedral(n, a);
  }
  ConvexCone c;
  c.kind_ = Kind::Circular;
  c.dim_ = static_cast<int>(axis.size());
  c.half_angle_ = half_angle;
  c.normals_ = Mat(0, c.dim_);
  c.build_frame(a);
  c.user_axis_ = false;
  c.compute_solid_angle();
  return c;
}

ConvexCone ConvexCone::whole_space(int n) { return polyhedral(Mat(0, n)); }

ConvexCone ConvexCone::orthant(int n) { return polyhedral(Mat::Identity(n, n)); }

ConvexCone ConvexCone::half_space(const Vec& normal) {
  Mat n(1, normal.size());
  n.row(0) = normal.transpose();
  return polyhedral(n);
}

ConvexCone ConvexCone::planar(double opening) {
  if (!(opening > 0.0 && opening <= kPi)) throw GeometryError("planar cone opening must lie in (0, pi]");
  if (opening == kPi) return half_space(Vec2(0.0, 1.0));
  const double a0 = kPi / 2 - opening / 2, a1 = kPi / 2 + opening / 2;
  Mat n(2, 2);
  n << -std::sin(a0), std::cos(a0), std::sin(a1), -std::cos(a1);
  return polyhedral(n);
}

void ConvexCone::build_frame(std::optional<Vec> axis) {
  const int n = dim_;
  frame_ = Mat::Identity(n, n);
  if (kind_ == Kind::Circular) {
    lineality_ = 0;
    axis_ = *axis;
    Mat basis(n, n);
    basis.col(0) = axis_;
    basis.rightCols(n - 1) = Mat::Identity(n, n).leftCols(n - 1);
    Eigen::ColPivHouseholderQR<Mat> qr(Mat(basis.rightCols(n - 1) - axis_ * (axis_.transpose() * basis.rightCols(n - 1))));
    Mat q = qr.householderQ();
    frame_.topRows(n - 1) = q.leftCols(n - 1).transpose();
    frame_.row(n - 1) = axis_.transpose();
    if (frame_.determinant() < 0) frame_.row(0) *= -1.0;
    return;
  }
  if (normals_.rows() == 0) {
    lineality_ = n;
    axis_ = Vec();
    return;
  }
  Eigen::JacobiSVD<Mat> svd(normals_, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * sv[0]) ++rank;
  lineality_ = n - rank;
  const Mat V = svd.matrixV();
  const Mat lin = V.rightCols(lineality_);
  Vec a;
  if (axis) {
    if (axis->size() != n) throw GeometryError("cone axis has wrong dimension");
    a = *axis - lin * (lin.transpose() * *axis);
  } else {
    a = normals_.colwise().sum().transpose();
    a -= lin * (lin.transpose() * a);
  }
  if (a.norm() < 1e-12) throw GeometryError("cone axis must have a component outside the lineality space");
  axis_ = a.normalized();
  Mat comp = V.leftCols(rank);
  comp -= axis_ * (axis_.transpose() * comp);
  Mat rest(n, 0);
  if (rank > 1) {
    Eigen::ColPivHouseholderQR<Mat> qr(comp);
    Mat q = qr.householderQ();
    rest = q.leftCols(rank - 1);
  }
  for (int i = 0; i < lineality_; ++i) frame_.row(i) = lin.col(i).transpose();
  for (int i = 0; i < rank - 1; ++i) frame_.row(lineality_ + i) = rest.col(i).transpose();
  frame_.row(n - 1) = axis_.transpose();
  if (n > 1 && frame_.determinant() < 0) frame_.row(0) *= -1.0;
}

bool ConvexCone::contains(const Vec& x) const {
  if (kind_ == Kind::Circular) return axis_.dot(x) > std::cos(half_angle_) * x.norm();
  for (Eigen::Index i = 0; i < normals_.rows(); ++i)
    if (!(normals_.row(i).dot(x) > 0.0)) return false;
  return true;
}

bool ConvexCone::contains_closure(const Vec& x, double tol) const {
  if (kind_ == Kind::Circular) return axis_.dot(x) >= std::cos(half_angle_) * x.norm() - tol;
  for (Eigen::Index i = 0; i < normals_.rows(); ++i)
    if (normals_.row(i).dot(x) < -tol) return false;
  return true;
}

bool ConvexCone::on_boundary(const Vec& x, double tol) const {
  if (!contains_closure(x, tol)) return false;
  if (kind_ == Kind::Circular) return std::abs(axis_.dot(x) - std::cos(half_angle_) * x.norm()) <= tol;
  for (Eigen::Index i = 0; i < normals_.rows(); ++i)
    if (std::abs(normals_.row(i).dot(x)) <= tol) return true;
  return false;
}

int ConvexCone::common_facet(const std::vector<Vec>& pts, double tol) const {
  if (pts.empty()) return -1;
  if (kind_ == Kind::Circular) {
    for (const Vec& p : pts)
      if (std::abs(axis_.dot(p) - std::cos(half_angle_) * p.norm()) > tol) return -1;
    return 0;
  }
  for (Eigen::Index i = 0; i < normals_.rows(); ++i) {
    bool all = true;
    for (const Vec& p : pts) {
      if (std::abs(normals_.row(i).dot(p)) > tol) {
        all = false;
        break;
      }
    }
    if (all) return static_cast<int>(i);
  }
  return -1;
}

Vec ConvexCone::project(const Vec& y) const {
  if (kind_ == Kind::Circular) {
    const double t = axis_.dot(y);
    const Vec w = y - t * axis_;
    const double wn = w.norm();
    const double tn = std::tan(half_angle_);
    if (wn <= tn * t) return y;
    if (tn * wn <= -t) return Vec::Zero(dim_);
    const Vec d = std::cos(half_angle_) * axis_ + std::sin(half_angle_) * (w / wn);
    return d.dot(y) * d;
  }
  if (normals_.rows() == 0) return y;
  if ((normals_ * y).minCoeff() >= 0.0) return y;
  const Vec lambda = nnls(normals_.transpose(), -y);
  const Vec rough = y + normals_.transpose() * lambda;
  // Polish on the active set: p = y - N_A^T m with N_A p = 0.
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda[i] > 0.0) active.push_back(i);
  if (active.empty()) return rough;
  const Mat NA = normals_(active, Eigen::all);
  const Vec m = (NA * NA.transpose()).completeOrthogonalDecomposition().solve(NA * y);
  const Vec p = y - NA.transpose() * m;
  const double tol = 1e-12 * std::max(1.0, y.norm());
  if (m.minCoeff() >= -tol && (normals_ * p).minCoeff() >= -tol) return p;
  return rough;
}

SupportBracket ConvexCone::unit_support(const Vec& nu) const {
  const Vec p = project(nu);
  const double upper = p.norm();
  if (kind_ == Kind::Circular || normals_.rows() == 0) return {upper, upper};
  double lower = 0.0;
  if (upper > 1e-300) {
    const Vec z = p / upper;
    if ((normals_ * z).minCoeff() >= -1e-9) lower = std::clamp(nu.dot(z), 0.0, upper);
  }
  return {lower, upper};
}

Mat ConvexCone::pointed_normals() const {
  const int d = dim_ - lineality_;
  return normals_ * frame_.bottomRows(d).transpose();
}

std::vector<Vec> ConvexCone::extreme_rays() const {
  std::vector<Vec> rays;
  const int d = dim_ - lineality_;
  if (kind_ == Kind::Circular || d == 0) return rays;
  const Mat fp = frame_.bottomRows(d);
  if (d == 1) {
    rays.push_back(axis_);
    return rays;
  }
  const Mat np = pointed_normals();
  const int m = static_cast<int>(np.rows());
  std::vector<Vec> local;
  for_each_subset(m, d - 1, [&](const std::vector<int>& idx) {
    Mat sub(d - 1, d);
    for (int i = 0; i < d - 1; ++i) sub.row(i) = np.row(idx[i]);
    Eigen::JacobiSVD<Mat> svd(sub, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() > 0 && sv[sv.size() - 1] < 1e-10 * std::max(1.0, sv[0])) return;
    Vec u = svd.matrixV().col(d - 1);
    for (double sign : {1.0, -1.0}) {
      const Vec cand = sign * u;
      if ((np * cand).minCoeff() >= -1e-10) {
        bool dup = false;
        for (const Vec& r : local) dup = dup || (r - cand).norm() < 1e-9;
        if (!dup) local.push_back(cand);
      }
    }
  });
  for (const Vec& u : local) rays.push_back((fp.transpose() * u).normalized());
  return rays;
}

void ConvexCone::compute_solid_angle() {
  const int n = dim_;
  const double sphere = unit_sphere_area(n);
  if (kind_ == Kind::Circular) {
    if (n == 3) {
      solid_angle_ = Estimate::closed(2.0 * kPi * (1.0 - std::cos(half_angle_)));
    } else {
      const double inner = integrate([n](double t) { return std::pow(std::sin(t), n - 2); }, 0.0, half_angle_);
      solid_angle_ = Estimate::closed(unit_sphere_area(n - 1) * inner);
    }
    return;
  }
  const int d = n - lineality_;
  if (d == 0) {
    solid_angle_ = Estimate::closed(sphere);
    return;
  }
  if (d == 1) {
    solid_angle_ = Estimate::closed(0.5 * sphere);
    return;
  }
  const auto rays = extreme_rays();
  if (d == 2) {
    if (rays.size() != 2) throw GeometryError("planar factor must have two extreme rays");
    const double ang = std::acos(std::clamp(rays[0].dot(rays[1]), -1.0, 1.0));
    solid_angle_ = Estimate::closed(sphere * ang / (2.0 * kPi));
    return;
  }
  if (d == 3) {
    const Mat fp = frame_.bottomRows(3);
    std::vector<std::pair<double, Eigen::Vector3d>> around;
    for (const Vec& r : rays) {
      const Vec u = fp * r;
      around.emplace_back(std::atan2(u[1], u[0]), Eigen::Vector3d(u[0], u[1], u[2]));
    }
    std::sort(around.begin(), around.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double omega = 0.0;
    for (std::size_t i = 1; i + 1 < around.size(); ++i)
      omega += triangle_solid_angle(around[0].second, around[i].second, around[i + 1].second);
    solid_angle_ = Estimate::closed(sphere * omega / (4.0 * kPi));
    return;
  }
  const Mat np = pointed_normals();
  if (np.rows() == d && (np * np.transpose() - Mat::Identity(d, d)).norm() < 1e-12) {
    solid_angle_ = Estimate::closed(sphere * std::ldexp(1.0, -d));
    return;
  }
  // Gaussian directions are uniform on the sphere; the hit fraction is the
  // solid-angle fraction.
  constexpr int kSamples = 2'000'000;
  CounterRng rng(0x5EC7A1, static_cast<std::uint64_t>(d));
  long hits = 0;
  for (int i = 0; i < kSamples; ++i)
    if ((np * rng.normal_vector(d)).minCoeff() > 0.0) ++hits;
  const double p = static_cast<double>(hits) / kSamples;
  solid_angle_ = Estimate::sampled(sphere * p, sphere * std::sqrt(p * (1.0 - p) / kSamples));
}

}  // namespace conestab
