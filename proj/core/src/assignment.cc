#include "xcoref/assignment.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace xcoref {

// Shortest augmenting path formulation with row/column potentials, solving
// the minimization problem on cost = max_entry - score.
Assignment MaxWeightAssignment(const Eigen::MatrixXd& scores) {
  if (!scores.allFinite()) throw std::invalid_argument("assignment scores must be finite");
  const int rows = static_cast<int>(scores.rows());
  const int cols = static_cast<int>(scores.cols());
  Assignment result;
  result.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return result;

  const int n = std::max(rows, cols);
  const double top = scores.maxCoeff();
  auto cost = [&](int r, int c) {
    // Padding cells score 0.
    const double s = (r < rows && c < cols) ? scores(r, c) : 0.0;
    return std::max(top, 0.0) - s;
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> col_owner(n + 1, 0), way(n + 1, 0);
  for (int r = 1; r <= n; ++r) {
    col_owner[0] = r;
    int c0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[c0] = true;
      const int r0 = col_owner[c0];
      double delta = kInf;
      int c1 = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double slack = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (slack < min_slack[c]) {
          min_slack[c] = slack;
          way[c] = c0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          c1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[col_owner[c]] += delta;
          v[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      c0 = c1;
    } while (col_owner[c0] != 0);
    do {
      const int c1 = way[c0];
      col_owner[c0] = col_owner[c1];
      c0 = c1;
    } while (c0 != 0);
  }

  for (int c = 1; c <= n; ++c) {
    const int r = col_owner[c] - 1;
    if (r < rows && c - 1 < cols) result.row_to_col[r] = c - 1;
  }
  for (int r = 0; r < rows; ++r) {
    if (result.row_to_col[r] >= 0) result.total += scores(r, result.row_to_col[r]);
  }
  return result;
}

}  // namespace xcoref
