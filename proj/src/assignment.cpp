#include "otnet/assignment.hpp"

#include <algorithm>
#include <limits>

namespace otnet {

Assignment solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw ValidationError("solve_assignment: cost matrix must be square");
  if (!cost.allFinite()) throw ValidationError("solve_assignment: non-finite cost");
  const Index n = cost.rows();
  Assignment result;
  if (n == 0) return result;

  const PointsX<double> c = cost;  // row-major for the inner scan
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based: index 0 is the virtual root of each augmenting search.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<Index> row_of_col(n + 1, 0), prev_col(n + 1, 0);
  std::vector<char> used(n + 1);

  for (Index row = 1; row <= n; ++row) {
    row_of_col[0] = row;
    Index col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const Index i0 = row_of_col[col0];
      double delta = kInf;
      Index col1 = 0;
      const double ui0 = u[i0];
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = c(i0 - 1, j - 1) - ui0 - v[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          prev_col[j] = col0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          col1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col0 = col1;
    } while (row_of_col[col0] != 0);
    do {
      const Index col1 = prev_col[col0];
      row_of_col[col0] = row_of_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  result.column_of_row.assign(static_cast<std::size_t>(n), 0);
  for (Index j = 1; j <= n; ++j) result.column_of_row[static_cast<std::size_t>(row_of_col[j] - 1)] = j - 1;
  for (Index i = 0; i < n; ++i) result.cost += cost(i, result.column_of_row[static_cast<std::size_t>(i)]);
  return result;
}

}  // namespace otnet
