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
#include <algorithm>
#include <cmath>

#include "dpp/dpp.hpp"

namespace batchpref {

GreedyModeResult GreedyModeOnMatrix(const Matrix& L, std::size_t k, const Vector& fallback_priority) {
  const auto n = static_cast<std::size_t>(L.rows());
  Require(L.rows() == L.cols(), ErrorCode::kInvalidInput, "kernel must be square");
  Require(k <= n, ErrorCode::kInvalidInput, "batch size k exceeds kernel size");
  Require(static_cast<std::size_t>(fallback_priority.size()) == n, ErrorCode::kInvalidInput,
          "fallback priority size mismatch");
  GreedyModeResult result;
  if (k == 0) return result;

  const double zero_tol = 1e-12 * std::max(1.0, L.diagonal().cwiseAbs().maxCoeff());
  // Row j of c holds the Cholesky coefficients of L_{A, j}; d2[j] is the
  // Schur complement L_jj - |c_j|^2 = det(L_{A+j}) / det(L_A).
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  Vector d2 = L.diagonal();
  std::vector<bool> taken(n, false);
  double log_det = 0.0;

  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      if (best == n || d2[static_cast<Eigen::Index>(j)] > d2[static_cast<Eigen::Index>(best)]) best = j;
    }
    if (d2[static_cast<Eigen::Index>(best)] <= zero_tol) {
      // Degenerate: no candidate adds volume; fill by priority.
      while (result.positions.size() < k) {
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j) {
          if (taken[j]) continue;
          if (pick == n || fallback_priority[static_cast<Eigen::Index>(j)] >
                               fallback_priority[static_cast<Eigen::Index>(pick)]) {
            pick = j;
          }
        }
        taken[pick] = true;
        result.positions.push_back(pick);
        ++result.fallback_picks;
      }
      break;
    }
    const auto b = static_cast<Eigen::Index>(best);
    const double pivot = std::sqrt(d2[b]);
    log_det += std::log(d2[b]);
    taken[best] = true;
    result.positions.push_back(best);
    result.log_dets.push_back(log_det);
    const auto s = static_cast<Eigen::Index>(step);
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      const double e = (L(b, jj) - c.row(b).head(s).dot(c.row(jj).head(s))) / pivot;
      c(jj, s) = e;
      d2[jj] -= e * e;
    }
  }
  return result;
}

GreedyModeResult GreedyMode(const DppKernel& kernel, std::size_t k) {
  return GreedyModeOnMatrix(kernel.ModeKernel(), k, kernel.quality);
}

}  // namespace batchpref
