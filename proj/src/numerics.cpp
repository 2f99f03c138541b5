#include "conestab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace conestab {

Vec nnls(const Mat& A, const Vec& b, int max_iterations) {
  const Eigen::Index m = A.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * m + 10);
  Vec x = Vec::Zero(m);
  std::vector<bool> passive(m, false);
  const double tol = 1e-13 * std::max(1.0, A.norm() * std::max(1.0, b.norm()));

  auto solve_passive = [&](Vec& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < m; ++j)
      if (passive[j]) idx.push_back(j);
    s = Vec::Zero(m);
    if (idx.empty()) return;
    Mat Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    Vec sp = Ap.colPivHouseholderQr().solve(b);
    for (std::size_t k = 0; k < idx.size(); ++k) s[idx[k]] = sp[static_cast<Eigen::Index>(k)];
  };

  for (int outer = 0; outer < max_iterations; ++outer) {
    Vec w = A.transpose() * (b - A * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;
    for (int inner = 0; inner < max_iterations; ++inner) {
      Vec s;
      solve_passive(s);
      double min_s = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < m; ++j)
        if (passive[j]) min_s = std::min(min_s, s[j]);
      if (min_s > 0.0) {
        x = s;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[j] && s[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - s[j]));
      }
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[j] && x[j] <= 1e-15) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  return x;
}

std::optional<Vec> least_distance(const Mat& G, const Vec& h) {
  const Eigen::Index n = G.cols();
  const Eigen::Index m = G.rows();
  Mat E(n + 1, m);
  E.topRows(n) = G.transpose();
  E.row(n) = h.transpose();
  Vec f = Vec::Zero(n + 1);
  f[n] = 1.0;
  Vec u = nnls(E, f);
  Vec r = E * u - f;
  if (r.norm() < 1e-12) return std::nullopt;
  return Vec(-r.head(n) / r[n]);
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Gk {
  double kronrod;
  double error;
};

Gk gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double rk = fc * kWgk[7];
  double rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  return {rk * h, std::abs((rk - rg) * h)};
}

double integrate_rec(const std::function<double(double)>& f, double a, double b, double abs_tol,
                     double rel_tol, int depth, const Gk& whole) {
  if (whole.error <= std::max(abs_tol, rel_tol * std::abs(whole.kronrod)) || depth <= 0)
    return whole.kronrod;
  const double c = 0.5 * (a + b);
  const Gk left = gk15(f, a, c), right = gk15(f, c, b);
  return integrate_rec(f, a, c, 0.5 * abs_tol, rel_tol, depth - 1, left) +
         integrate_rec(f, c, b, 0.5 * abs_tol, rel_tol, depth - 1, right);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  return integrate_rec(f, a, b, abs_tol, rel_tol, max_depth, gk15(f, a, b));
}

QuadratureRule gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

SimplexResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& start,
                          double step, double diameter_tol, int max_evaluations) {
  const Eigen::Index n = start.size();
  std::vector<Vec> pts(n + 1, start);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(n + 1);
  SimplexResult res;
  for (Eigen::Index i = 0; i <= n; ++i) vals[i] = f(pts[i]);
  res.evaluations = static_cast<int>(n + 1);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (vals[a] != vals[b]) return vals[a] < vals[b];
      return lex_less(pts[a], pts[b]);
    });
    std::vector<Vec> p2;
    std::vector<double> v2;
    for (std::size_t i : order) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i) d = std::max(d, (pts[i] - pts[0]).norm());
    return d;
  };

  while (res.evaluations < max_evaluations) {
    sort_simplex();
    if (diameter() < diameter_tol) {
      res.converged = true;
      break;
    }
    Vec centroid = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += pts[i];
    centroid /= static_cast<double>(n);
    const Vec& worst = pts[n];
    Vec xr = centroid + (centroid - worst);
    const double fr = f(xr);
    ++res.evaluations;
    if (fr < vals[0]) {
      Vec xe = centroid + 2.0 * (centroid - worst);
      const double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
      continue;
    }
    if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
      continue;
    }
    const bool outside = fr < vals[n];
    Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (worst - centroid));
    const double fcv = f(xc);
    ++res.evaluations;
    if (fcv < (outside ? fr : vals[n])) {
      pts[n] = xc;
      vals[n] = fcv;
      continue;
    }
    for (Eigen::Index i = 1; i <= n; ++i) {
      pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
      vals[i] = f(pts[i]);
    }
    res.evaluations += static_cast<int>(n);
  }
  sort_simplex();
  res.argmin = pts[0];
  res.value = vals[0];
  if (!res.converged) res.converged = diameter() < diameter_tol;
  return res;
}

}  // namespace conestab
