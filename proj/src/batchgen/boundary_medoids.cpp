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

#include "batchgen/batchgen.hpp"

namespace batchpref {

Batch BoundaryMedoidsBatch(const ScoredQuerySet& reduced, std::size_t k, std::uint64_t seed) {
  Require(k <= reduced.size(), ErrorCode::kInvalidInput, "batch size k exceeds reduced size N");
  const IndexList vertices = HullVertices(reduced.psis);
  IndexList positions;
  if (vertices.size() >= k) {
    RowMatrix boundary(static_cast<Eigen::Index>(vertices.size()), reduced.psis.cols());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      boundary.row(static_cast<Eigen::Index>(i)) = reduced.psis.row(static_cast<Eigen::Index>(vertices[i]));
    }
    for (std::size_t local : KMedoids(boundary, k, seed)) positions.push_back(vertices[local]);
  } else {
    // Too few vertices: take them all, fill with the best-scoring interior
    // queries.
    positions = vertices;
    IndexList interior;
    for (std::size_t i = 0; i < reduced.size(); ++i) {
      if (!std::binary_search(vertices.begin(), vertices.end(), i)) interior.push_back(i);
    }
    Vector interior_scores(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t i = 0; i < interior.size(); ++i) {
      interior_scores[static_cast<Eigen::Index>(i)] = reduced.scores[static_cast<Eigen::Index>(interior[i])];
    }
    for (std::size_t p : TopKPositions(interior_scores, k - vertices.size())) {
      positions.push_back(interior[p]);
    }
  }
  return MakeBatch(reduced, positions, BatchMethod::kBoundaryMedoids);
}

}  // namespace batchpref
