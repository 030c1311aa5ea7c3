#include "mtmc/assignment.hpp"

#include <algorithm>
#include <limits>

#include "mtmc/error.hpp"

namespace mtmc {

namespace {

// Min-cost assignment of every row to a distinct column, rows <= cols.
// 1-based potentials formulation.
std::vector<int> min_cost_rows(const std::vector<std::vector<std::int64_t>>& cost, int n, int m) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(m + 1, 0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> max_weight_assignment(const std::vector<std::vector<std::int64_t>>& weights) {
  const int rows = static_cast<int>(weights.size());
  if (rows == 0) return {};
  const int cols = static_cast<int>(weights.front().size());
  for (const auto& r : weights) {
    if (static_cast<int>(r.size()) != cols) throw Error("assignment: ragged weight matrix");
    for (auto w : r) {
      if (w < 0) throw Error("assignment: weights must be non-negative");
    }
  }
  if (cols == 0) return std::vector<int>(rows, -1);

  // Maximizing weight == minimizing negated weight; zero-weight pairs are
  // reported as unmatched.
  const bool transpose = rows > cols;
  const int n = transpose ? cols : rows;
  const int m = transpose ? rows : cols;
  std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) cost[i][j] = -(transpose ? weights[j][i] : weights[i][j]);
  }
  const auto match = min_cost_rows(cost, n, m);

  std::vector<int> result(rows, -1);
  for (int i = 0; i < n; ++i) {
    const int j = match[i];
    if (j < 0) continue;
    const int r = transpose ? j : i;
    const int c = transpose ? i : j;
    if (weights[r][c] > 0) result[r] = c;
  }
  return result;
}

}  // namespace mtmc
