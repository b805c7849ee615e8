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

#ifndef RMOT__TRACK__ASSIGNMENT_HPP_
#define RMOT__TRACK__ASSIGNMENT_HPP_

#include <Eigen/Core>

#include <limits>
#include <utility>
#include <vector>

namespace rmot::track
{

struct AssignmentResult
{
  std::vector<std::pair<int, int>> matches;  // (row, col), sorted by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost{0.0};

  /// Column matched to `row`, or -1.
  int col_of(int row) const;
  /// Row matched to `col`, or -1.
  int row_of(int col) const;
};

/// Gated rectangular assignment. A pair (i, j) is feasible when
/// cost(i, j) <= gate(i, j) and cost(i, j) is finite. Among feasible partial
/// matchings the solver returns one with the largest number of pairs and,
/// among those, the smallest total cost. Infeasible pairs are never matched.
AssignmentResult hungarian_assign(const Eigen::MatrixXd & cost, const Eigen::MatrixXd & gate);

AssignmentResult hungarian_assign(const Eigen::MatrixXd & cost,
                                  double gate = std::numeric_limits<double>::infinity());

}  // namespace rmot::track

#endif  // RMOT__TRACK__ASSIGNMENT_HPP_
