// Copyright 2026 The batchpref Authors
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
#include <cmath>
#include <vector>

#include "batchgen/batchgen.hpp"

namespace batchpref {
namespace {

constexpr double kFeasibilityTolerance = 1e-7;
constexpr double kPivotTolerance = 1e-12;

// Phase-1 simplex for { lambda >= 0 : A lambda = b } with b >= 0, using one
// artificial variable per row and Bland's rule. Returns the minimal sum of
// artificials; zero (within tolerance) means feasible.
double PhaseOneInfeasibility(Matrix a, Vector b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  for (Eigen::Index r = 0; r < m; ++r) {
    if (b[r] < 0.0) {
      a.row(r) *= -1.0;
      b[r] = -b[r];
    }
  }
  // Tableau columns: [structural n | artificial m | rhs].
  Matrix t = Matrix::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.col(n + m).head(m) = b;
  // Cost row holds reduced costs of minimizing sum(artificials).
  for (Eigen::Index j = 0; j < n; ++j) t(m, j) = -a.col(j).sum();
  t(m, n + m) = -b.sum();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;

  const int max_pivots = 50 * static_cast<int>(n + m) + 100;
  for (int iter = 0; iter < max_pivots; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(m, j) < -kPivotTolerance) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) {
      const double coef = t(r, enter);
      if (coef <= kPivotTolerance) continue;
      const double ratio = t(r, n + m) / coef;
      if (leave < 0 || ratio < best_ratio - kPivotTolerance ||
          (std::abs(ratio - best_ratio) <= kPivotTolerance &&
           basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction; cannot happen for phase 1
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index r = 0; r <= m; ++r) {
      if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  return -t(m, n + m);
}

}  // namespace

IndexList HullVertices(const RowMatrix& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  IndexList vertices;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool duplicate_of_lower = false;
    std::vector<Eigen::Index> others;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (points.row(j) == points.row(i)) {
        if (j < i) duplicate_of_lower = true;
        continue;
      }
      others.push_back(j);
    }
    if (duplicate_of_lower) continue;
    if (others.empty()) {
      vertices.push_back(static_cast<std::size_t>(i));
      continue;
    }
    // Rows: sum_j lambda_j (x_j - p) = 0 and sum_j lambda_j = 1.
    const auto cols = static_cast<Eigen::Index>(others.size());
    Matrix a(d + 1, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      a.col(c).head(d) = (points.row(others[static_cast<std::size_t>(c)]) - points.row(i)).transpose();
      a(d, c) = 1.0;
    }
    const double scale = a.topRows(d).cwiseAbs().maxCoeff();
    if (scale > 0.0) a.topRows(d) /= scale;
    Vector b = Vector::Zero(d + 1);
    b[d] = 1.0;
    if (PhaseOneInfeasibility(a, b) > kFeasibilityTolerance) {
      vertices.push_back(static_cast<std::size_t>(i));
    }
  }
  return vertices;
}

}  // namespace batchpref
