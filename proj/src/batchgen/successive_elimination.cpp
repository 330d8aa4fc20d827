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
#include <limits>
#include <numeric>

#include "batchgen/batchgen.hpp"

namespace batchpref {

IndexList SuccessiveEliminationPositions(const RowMatrix& psis, const Vector& scores, std::size_t k) {
  const auto n = static_cast<std::size_t>(psis.rows());
  Require(k <= n, ErrorCode::kInvalidInput, "batch size k exceeds reduced size N");
  Require(static_cast<std::size_t>(scores.size()) == n, ErrorCode::kInvalidInput,
          "score / psi count mismatch");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  Matrix dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double dd = (psis.row(static_cast<Eigen::Index>(i)) - psis.row(static_cast<Eigen::Index>(j))).squaredNorm();
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dd;
      dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = dd;
    }
  }
  std::vector<bool> alive(n, true);
  // nn[i]: nearest surviving j > i (lowest such j on ties), cached.
  std::vector<std::size_t> nn(n, n);
  std::vector<double> nn_dist(n, kInf);
  auto refresh = [&](std::size_t i) {
    nn[i] = n;
    nn_dist[i] = kInf;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!alive[j]) continue;
      const double dd = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (dd < nn_dist[i]) {
        nn_dist[i] = dd;
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  for (std::size_t remaining = n; remaining > k; --remaining) {
    // Closest surviving pair, ties to the lexicographically smallest (i, j).
    std::size_t bi = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i] && nn[i] < n && (bi == n || nn_dist[i] < nn_dist[bi])) bi = i;
    }
    const std::size_t bj = nn[bi];
    const double qi = scores[static_cast<Eigen::Index>(bi)];
    const double qj = scores[static_cast<Eigen::Index>(bj)];
    // bi < bj, so an MI tie removes bj.
    const std::size_t drop = qi < qj ? bi : bj;
    alive[drop] = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i] && nn[i] == drop) refresh(i);
    }
  }
  IndexList kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) kept.push_back(i);
  }
  return kept;
}

Batch SuccessiveEliminationBatch(const ScoredQuerySet& reduced, std::size_t k) {
  return MakeBatch(reduced, SuccessiveEliminationPositions(reduced.psis, reduced.scores, k),
                   BatchMethod::kSuccessiveElimination);
}

}  // namespace batchpref
