#include "cap/internal/simplex.hpp"

#include <cmath>
#include <vector>

namespace cap::detail {

// Phase-1 simplex on min 1'a s.t. Ax + diag(sign) a = b, x >= 0, a >= 0.
// Dense tableau with Bland's rule; returns the optimal artificial mass
// (0 iff Ax = b, x >= 0 is feasible). Sized for a few hundred columns.
double phase1_infeasibility(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in) {
  const int m = int(a_in.rows());
  const int n = int(a_in.cols());
  if (m == 0) return 0.0;

  Eigen::MatrixXd a = a_in;
  Eigen::VectorXd b = b_in;
  for (int i = 0; i < m; ++i)
    if (b[i] < 0) {
      a.row(i) *= -1.0;
      b[i] *= -1.0;
    }

  const int total = n + m;  // artificials appended
  // tableau rows: m constraints + cost row (phase-1 reduced costs)
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, total + 1);
  t.block(0, 0, m, n) = a;
  t.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  t.col(total).head(m) = b;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  // cost row: minimize sum of artificials => reduced costs start as -sum of rows
  for (int j = 0; j <= total; ++j) {
    double s = 0;
    for (int i = 0; i < m; ++i) s += t(i, j);
    t(m, j) = -s;
  }
  for (int i = 0; i < m; ++i) t(m, n + i) = 0.0;

  const double eps = 1e-11;
  const long max_iter = 2000L * (m + n);
  for (long it = 0; it < max_iter; ++it) {
    // Bland: entering = lowest index with negative reduced cost
    int enter = -1;
    for (int j = 0; j < total; ++j)
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;

    int leave = -1;
    double best = 0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        const double ratio = t(i, total) / t(i, enter);
        if (leave < 0 || ratio < best - eps ||
            (ratio < best + eps && basis[i] < basis[leave]))
          leave = i, best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded cannot happen for phase 1; bail out safely

    const double piv = t(leave, enter);
    t.row(leave) /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave);
    }
    basis[leave] = enter;
  }

  return std::max(0.0, -t(m, total));
}

}  // namespace cap::detail
