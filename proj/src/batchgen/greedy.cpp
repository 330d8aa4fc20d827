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
#include <numeric>

#include "batchgen/batchgen.hpp"

namespace batchpref {

const char* BatchMethodName(BatchMethod method) {
  switch (method) {
    case BatchMethod::kGreedy: return "greedy";
    case BatchMethod::kMedoids: return "medoids";
    case BatchMethod::kBoundaryMedoids: return "boundary_medoids";
    case BatchMethod::kSuccessiveElimination: return "successive_elimination";
    case BatchMethod::kAnnealing: return "annealing";
    case BatchMethod::kDppMode: return "dpp";
  }
  return "unknown";
}

Batch MakeBatch(const ScoredQuerySet& reduced, const IndexList& positions, BatchMethod method) {
  Batch b;
  b.method = method;
  b.indices.reserve(positions.size());
  for (std::size_t p : positions) {
    Require(p < reduced.size(), ErrorCode::kInvalidInput, "position outside the reduced set");
    b.indices.push_back(reduced.indices[p]);
  }
  return b;
}

IndexList TopKPositions(const Vector& scores, std::size_t k) {
  const auto n = static_cast<std::size_t>(scores.size());
  Require(k <= n, ErrorCode::kInvalidInput, "batch size k exceeds candidate count");
  IndexList order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double sa = scores[static_cast<Eigen::Index>(a)];
                      const double sb = scores[static_cast<Eigen::Index>(b)];
                      return sa > sb || (sa == sb && a < b);
                    });
  order.resize(k);
  return order;
}

Batch GreedyBatch(const ScoredQuerySet& reduced, std::size_t k) {
  Require(k <= reduced.size(), ErrorCode::kInvalidInput, "batch size k exceeds reduced size N");
  return MakeBatch(reduced, TopKPositions(reduced.scores, k), BatchMethod::kGreedy);
}

}  // namespace batchpref
