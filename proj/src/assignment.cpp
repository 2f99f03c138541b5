#include "conestab/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace conestab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Row-major copies keep the inner loops of the solvers on contiguous memory.
struct SquaredCost {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat X;
  RowMat Y;
  int d;
  SquaredCost(const Mat& x, const Mat& y) : X(x), Y(y), d(static_cast<int>(x.cols())) {}
  double operator()(int i, int j) const {
    const double* a = X.data() + static_cast<std::ptrdiff_t>(i) * d;
    const double* b = Y.data() + static_cast<std::ptrdiff_t>(j) * d;
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
  }
};

// Shortest augmenting path solver on the rows in `rows` and columns in
// `cols`, starting from feasible duals. Matches are written in place.
template <class Cost>
void augment_all(const Cost& c, const std::vector<int>& rows, const std::vector<int>& cols, std::vector<double>& u,
                 std::vector<double>& v, std::vector<int>& col4row, std::vector<int>& row4col) {
  const int m = static_cast<int>(cols.size());
  std::vector<double> spc(m);
  std::vector<int> path(m), remaining(m);
  std::vector<char> sc(m);
  std::vector<int> sr_rows;
  std::vector<int> local_of(row4col.size(), -1);
  for (int k = 0; k < m; ++k) local_of[cols[k]] = k;

  for (int cur : rows) {
    if (col4row[cur] >= 0) continue;
    std::fill(spc.begin(), spc.end(), kInf);
    std::fill(path.begin(), path.end(), -1);
    std::fill(sc.begin(), sc.end(), 0);
    std::iota(remaining.begin(), remaining.end(), 0);
    sr_rows.clear();
    int num_remaining = m;
    double min_val = 0.0;
    int i = cur, sink = -1;
    while (sink < 0) {
      sr_rows.push_back(i);
      double lowest = kInf;
      int index = -1;
      for (int it = 0; it < num_remaining; ++it) {
        const int k = remaining[it];
        const int j = cols[k];
        const double r = min_val + c(i, j) - u[i] - v[j];
        if (r < spc[k]) {
          path[k] = i;
          spc[k] = r;
        }
        if (spc[k] < lowest || (spc[k] == lowest && row4col[j] < 0)) {
          lowest = spc[k];
          index = it;
        }
      }
      if (index < 0 || !std::isfinite(lowest)) throw NumericalError("assignment problem is infeasible");
      min_val = lowest;
      const int k = remaining[index];
      const int j = cols[k];
      if (row4col[j] < 0) {
        sink = k;
      } else {
        i = row4col[j];
      }
      sc[k] = 1;
      remaining[index] = remaining[--num_remaining];
    }
    u[cur] += min_val;
    for (int r : sr_rows)
      if (r != cur) u[r] += min_val - spc[local_of[col4row[r]]];
    for (int k = 0; k < m; ++k)
      if (sc[k]) v[cols[k]] -= min_val - spc[k];
    int k = sink;
    for (;;) {
      const int r = path[k];
      const int j = cols[k];
      row4col[j] = r;
      const int prev = col4row[r];
      col4row[r] = j;
      if (r == cur) break;
      k = local_of[prev];
    }
  }
}

}  // namespace

double assignment_cost(const Mat& X, const Mat& Y, const std::vector<int>& col_for_row) {
  double total = 0.0;
  for (std::size_t i = 0; i < col_for_row.size(); ++i)
    total += (X.row(static_cast<Eigen::Index>(i)) - Y.row(col_for_row[i])).squaredNorm();
  return total;
}

Assignment solve_assignment(const Mat& X, const Mat& Y) {
  const int n = static_cast<int>(X.rows());
  if (Y.rows() != n || X.cols() != Y.cols()) throw GeometryError("assignment needs clouds of equal size and dimension");
  if (n > kMaxExactAssignment)
    throw NumericalError("exact assignment is limited to 5000 points; use the entropic solver");
  // The optimal bijection is unchanged when either cloud is translated, and
  // centred clouds give far shorter augmenting paths.
  const Mat Xc = X.rowwise() - X.colwise().mean();
  const Mat Yc = Y.rowwise() - Y.colwise().mean();
  const SquaredCost c(Xc, Yc);
  std::vector<double> u(n, 0.0), v(n, kInf);
  std::vector<int> col4row(n, -1), row4col(n, -1), argmin(n, -1);
  // Column reduction gives feasible duals and a partial tight matching.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double cij = c(i, j);
      if (cij < v[j]) {
        v[j] = cij;
        argmin[j] = i;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    const int i = argmin[j];
    if (i >= 0 && col4row[i] < 0) {
      col4row[i] = j;
      row4col[j] = i;
    }
  }
  // Row reduction: a free row whose reduced minimum sits on a free column is
  // matched directly.
  for (int i = 0; i < n; ++i) {
    if (col4row[i] >= 0) continue;
    double best = kInf;
    int arg = -1;
    for (int j = 0; j < n; ++j) {
      const double r = c(i, j) - v[j];
      if (r < best) {
        best = r;
        arg = j;
      }
    }
    u[i] = best;
    if (row4col[arg] < 0) {
      col4row[i] = arg;
      row4col[arg] = i;
    }
  }
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  augment_all(c, all, all, u, v, col4row, row4col);

  Assignment out;
  out.col_for_row = col4row;
  out.cost = assignment_cost(X, Y, col4row);
  // Duals of the centred problem shifted by the constant the translation adds.
  const double shift = out.cost - assignment_cost(Xc, Yc, col4row);
  out.dual_bound = std::accumulate(u.begin(), u.end(), 0.0) + std::accumulate(v.begin(), v.end(), 0.0) + shift;
  out.exact = true;
  return out;
}

Assignment solve_entropic(const Mat& X, const Mat& Y, const EntropicOptions& options) {
  const int n = static_cast<int>(X.rows());
  if (Y.rows() != n || X.cols() != Y.cols()) throw GeometryError("assignment needs clouds of equal size and dimension");
  if (n > 50000) throw NumericalError("entropic assignment is limited to 50000 points");
  const Mat Xc = X.rowwise() - X.colwise().mean();
  const Mat Yc = Y.rowwise() - Y.colwise().mean();
  const SquaredCost c(Xc, Yc);
  double eps = options.epsilon;
  if (eps <= 0.0) {
    const Vec lo = Xc.colwise().minCoeff().transpose().cwiseMin(Yc.colwise().minCoeff().transpose());
    const Vec hi = Xc.colwise().maxCoeff().transpose().cwiseMax(Yc.colwise().maxCoeff().transpose());
    eps = 1e-3 * (hi - lo).squaredNorm();
  }
  const double log_a = -std::log(static_cast<double>(n));
  Vec f = Vec::Zero(n), g = Vec::Zero(n);
  auto lse_row = [&](int i) {
    double mx = -kInf;
    for (int j = 0; j < n; ++j) mx = std::max(mx, (g[j] - c(i, j)) / eps);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::exp((g[j] - c(i, j)) / eps - mx);
    return mx + std::log(s);
  };
  auto lse_col = [&](int j) {
    double mx = -kInf;
    for (int i = 0; i < n; ++i) mx = std::max(mx, (f[i] - c(i, j)) / eps);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp((f[i] - c(i, j)) / eps - mx);
    return mx + std::log(s);
  };
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    for (int i = 0; i < n; ++i) f[i] = eps * log_a - eps * lse_row(i);
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      const double lc = lse_col(j);
      // Column marginal before the update measures the violation.
      err += std::abs(std::exp(lc + g[j] / eps) - 1.0 / n);
      g[j] = eps * log_a - eps * lc;
    }
    if (err < options.marginal_tol) break;
  }

  // Greedy rounding: rows claim their most likely column in order of confidence.
  std::vector<int> best(n);
  std::vector<double> score(n);
  for (int i = 0; i < n; ++i) {
    double top = -kInf;
    for (int j = 0; j < n; ++j) {
      const double s = g[j] - c(i, j);
      if (s > top) {
        top = s;
        best[i] = j;
      }
    }
    score[i] = top + f[i];
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
  std::vector<int> col4row(n, -1), row4col(n, -1);
  for (int i : order) {
    if (row4col[best[i]] < 0) {
      col4row[i] = best[i];
      row4col[best[i]] = i;
    }
  }
  std::vector<int> free_rows, free_cols;
  for (int i = 0; i < n; ++i)
    if (col4row[i] < 0) free_rows.push_back(i);
  for (int j = 0; j < n; ++j)
    if (row4col[j] < 0) free_cols.push_back(j);
  if (!free_rows.empty()) {
    std::vector<double> u(n, 0.0), v(n, 0.0);
    for (int j : free_cols) {
      v[j] = kInf;
      for (int i : free_rows) v[j] = std::min(v[j], c(i, j));
    }
    augment_all(c, free_rows, free_cols, u, v, col4row, row4col);
  }

  Assignment out;
  out.col_for_row = col4row;
  out.cost = assignment_cost(X, Y, col4row);
  // Dual bound from the c-transform of f, which is feasible for the
  // unregularized problem.
  double dual = f.sum();
  for (int j = 0; j < n; ++j) {
    double m = kInf;
    for (int i = 0; i < n; ++i) m = std::min(m, c(i, j) - f[i]);
    dual += m;
  }
  out.dual_bound = dual + out.cost - assignment_cost(Xc, Yc, col4row);
  out.exact = false;
  out.iterations = it;
  return out;
}

}  // namespace conestab
