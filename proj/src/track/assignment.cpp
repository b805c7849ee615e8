// Copyright 2026 The rmot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rmot/track/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmot/error.hpp"

namespace rmot::track
{

int AssignmentResult::col_of(int row) const
{
  for (const auto & [r, c] : matches) {
    if (r == row) return c;
  }
  return -1;
}

int AssignmentResult::row_of(int col) const
{
  for (const auto & [r, c] : matches) {
    if (c == col) return r;
  }
  return -1;
}

namespace
{

// Shortest augmenting path Hungarian method with potentials on an n x m
// matrix, n <= m. Returns the column for each row.
std::vector<int> solve_dense(const Eigen::MatrixXd & a)
{
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) fail(ErrorCode::Numeric, "assignment solver failed to augment");
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

AssignmentResult hungarian_assign(const Eigen::MatrixXd & cost, const Eigen::MatrixXd & gate)
{
  if (gate.rows() != cost.rows() || gate.cols() != cost.cols()) {
    fail(ErrorCode::InvalidArgument, "gate matrix shape differs from cost matrix");
  }
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  AssignmentResult out;

  auto feasible = [&](int i, int j) {
    const double c = cost(i, j);
    return std::isfinite(c) && c <= gate(i, j);
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool any = false;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!feasible(i, j)) continue;
      any = true;
      lo = std::min(lo, cost(i, j));
      hi = std::max(hi, cost(i, j));
    }
  }

  if (any) {
    // Shifted costs lie in [0, range]. An infeasible cell costs more than any
    // full set of feasible cells, so the optimum first maximizes the number of
    // feasible pairs and then minimizes their cost.
    const bool transpose = n > m;
    const int rows = transpose ? m : n;
    const int cols = transpose ? n : m;
    const double range = hi - lo;
    const double big = (range + 1.0) * (rows + 1);
    Eigen::MatrixXd a(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const int i = transpose ? c : r;
        const int j = transpose ? r : c;
        a(r, c) = feasible(i, j) ? cost(i, j) - lo : big;
      }
    }
    const std::vector<int> sol = solve_dense(a);
    for (int r = 0; r < rows; ++r) {
      const int c = sol[r];
      if (c < 0) continue;
      const int i = transpose ? c : r;
      const int j = transpose ? r : c;
      if (feasible(i, j)) out.matches.emplace_back(i, j);
    }
  }

  std::sort(out.matches.begin(), out.matches.end());
  std::vector<char> row_used(n, 0), col_used(m, 0);
  for (const auto & [i, j] : out.matches) {
    row_used[i] = 1;
    col_used[j] = 1;
    out.total_cost += cost(i, j);
  }
  for (int i = 0; i < n; ++i) {
    if (!row_used[i]) out.unmatched_rows.push_back(i);
  }
  for (int j = 0; j < m; ++j) {
    if (!col_used[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

AssignmentResult hungarian_assign(const Eigen::MatrixXd & cost, double gate)
{
  return hungarian_assign(cost, Eigen::MatrixXd::Constant(cost.rows(), cost.cols(), gate));
}

}  // namespace rmot::track
