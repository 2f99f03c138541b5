#include "conestab/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "conestab/numerics.hpp"

namespace conestab {

std::vector<Vec> polytope_vertices(const Mat& A, const Vec& b, double tol) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  std::vector<Vec> verts;
  if (m < n) return verts;
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (;;) {
    Mat S(n, n);
    Vec rhs(n);
    for (int i = 0; i < n; ++i) {
      S.row(i) = A.row(idx[i]);
      rhs[i] = b[idx[i]];
    }
    Eigen::FullPivLU<Mat> lu(S);
    if (lu.rank() == n) {
      Vec x = lu.solve(rhs);
      if (x.allFinite() && ((A * x - b).array() <= tol * scale).all()) {
        bool dup = false;
        for (const Vec& v : verts) dup = dup || (v - x).norm() < 1e-9 * scale;
        if (!dup) verts.push_back(x);
      }
    }
    int i = n - 1;
    while (i >= 0 && idx[i] == m - n + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return verts;
}

std::vector<Facet3> polytope_facets_3d(const Mat& A, const Vec& b, double tol) {
  if (A.cols() != 3) throw GeometryError("polytope_facets_3d needs a 3D polytope");
  const auto verts = polytope_vertices(A, b, tol);
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  std::vector<Facet3> facets;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const Eigen::Vector3d a = A.row(i).transpose();
    bool dup = false;
    for (const Facet3& f : facets)
      dup = dup || ((f.normal - a).norm() < 1e-12 && std::abs(b[f.constraint] - b[i]) < 1e-12 * scale);
    if (dup) continue;
    std::vector<Eigen::Vector3d> on;
    for (const Vec& v : verts)
      if (std::abs(a.dot(v) - b[i]) <= 1e-9 * scale) on.emplace_back(v[0], v[1], v[2]);
    if (on.size() < 3) continue;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& v : on) c += v;
    c /= static_cast<double>(on.size());
    Eigen::Vector3d u = a.unitOrthogonal();
    Eigen::Vector3d w = a.cross(u);
    std::sort(on.begin(), on.end(), [&](const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
      return std::atan2((p - c).dot(w), (p - c).dot(u)) < std::atan2((q - c).dot(w), (q - c).dot(u));
    });
    Facet3 f;
    f.normal = a;
    f.vertices = on;
    f.constraint = static_cast<int>(i);
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (std::size_t j = 0; j < on.size(); ++j) acc += (on[j] - c).cross(on[(j + 1) % on.size()] - c);
    f.area = 0.5 * std::abs(acc.dot(a));
    if (f.area > 0.0) facets.push_back(std::move(f));
  }
  return facets;
}

double polytope_volume_3d(const std::vector<Facet3>& facets) {
  double v = 0.0;
  for (const Facet3& f : facets) v += f.area * f.normal.dot(f.vertices.front());
  return v / 3.0;
}

}  // namespace conestab

namespace conestab {

namespace {

void subsets_up_to(int m, int r, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx;
  std::function<void(int)> rec = [&](int start) {
    fn(idx);
    if (static_cast<int>(idx.size()) == r) return;
    for (int i = start; i < m; ++i) {
      idx.push_back(i);
      rec(i + 1);
      idx.pop_back();
    }
  };
  rec(0);
}

}  // namespace

double ball_halfspace_support(const Vec& dir, const Mat& A, const Vec& b, Vec* argmax) {
  const int n = static_cast<int>(dir.size());
  const int m = static_cast<int>(A.rows());
  const double tol = 1e-11;
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec& u) {
    if (!u.allFinite()) return;
    if (u.squaredNorm() > 1.0 + tol) return;
    if (m > 0 && ((A * u - b).array() > tol * (1.0 + b.cwiseAbs().array())).any()) return;
    const double v = dir.dot(u);
    if (v > best) {
      best = v;
      if (argmax) *argmax = u;
    }
  };
  subsets_up_to(m, n, [&](const std::vector<int>& S) {
    const int k = static_cast<int>(S.size());
    if (k == 0) {
      const double len = dir.norm();
      consider(len > 0 ? Vec(dir / len) : Vec(Vec::Zero(n)));
      return;
    }
    Mat As(k, n);
    Vec bs(k);
    for (int i = 0; i < k; ++i) {
      As.row(i) = A.row(S[i]);
      bs[i] = b[S[i]];
    }
    Eigen::FullPivLU<Mat> lu(As);
    if (lu.rank() < k) return;
    // Closest point of the affine set {As u = bs} to the origin.
    const Vec p = As.transpose() * (As * As.transpose()).ldlt().solve(bs);
    if (k == n) {
      consider(p);
      return;
    }
    const double rho2 = 1.0 - p.squaredNorm();
    if (rho2 < -tol) return;
    const Mat kernel = lu.kernel();
    Eigen::HouseholderQR<Mat> qr(kernel);
    const Mat basis = Mat(qr.householderQ()).leftCols(kernel.cols());
    const Vec dproj = basis * (basis.transpose() * dir);
    const double rho = std::sqrt(std::max(0.0, rho2));
    consider(dproj.norm() > 1e-14 ? Vec(p + rho * dproj.normalized()) : p);
  });
  return best;
}

bool polyhedron_is_bounded(const Mat& A) {
  const int n = static_cast<int>(A.cols());
  if (A.rows() <= n) return false;
  for (int j = 0; j < n; ++j) {
    for (double s : {1.0, -1.0}) {
      Vec e = Vec::Zero(n);
      e[j] = s;
      const Vec lambda = nnls(A.transpose(), e);
      if ((A.transpose() * lambda - e).norm() > 1e-9) return false;
    }
  }
  return true;
}

}  // namespace conestab
