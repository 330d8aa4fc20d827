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
#ifndef BATCHPREF_BATCHGEN_BATCHGEN_HPP_
#define BATCHPREF_BATCHGEN_BATCHGEN_HPP_

#include <cstdint>
#include <string>

#include "acquisition/acquisition.hpp"

namespace batchpref {

enum class BatchMethod {
  kGreedy,
  kMedoids,
  kBoundaryMedoids,
  kSuccessiveElimination,
  kAnnealing,
  kDppMode,
};

const char* BatchMethodName(BatchMethod method);

struct Batch {
  IndexList indices;  // dataset indices
  BatchMethod method = BatchMethod::kGreedy;
  double generation_seconds = 0.0;
};

// Converts positions within the reduced set into a Batch of dataset indices.
Batch MakeBatch(const ScoredQuerySet& reduced, const IndexList& positions, BatchMethod method);

// Positions of the k highest scores, ties to the lower position.
IndexList TopKPositions(const Vector& scores, std::size_t k);

Batch GreedyBatch(const ScoredQuerySet& reduced, std::size_t k);

// Alternating (Voronoi-iteration) k-medoids on Euclidean distance with
// k-means++ seeding; at most 100 rounds. Returns row indices of the medoids in
// ascending order. Throws kInvalidInput if k > n.
IndexList KMedoids(const RowMatrix& points, std::size_t k, std::uint64_t seed);

Batch MedoidsBatch(const ScoredQuerySet& reduced, std::size_t k, std::uint64_t seed);

// Rows of points that are vertices of their convex hull: a point is a vertex
// iff it is not a convex combination of the other points, decided by a phase-1
// simplex feasibility program (tolerance 1e-7 after rescaling). Of several
// identical points only the lowest index can be a vertex.
IndexList HullVertices(const RowMatrix& points);

// k-medoids over the hull vertices; if fewer than k vertices exist, all of
// them plus the highest-MI non-vertex queries.
Batch BoundaryMedoidsBatch(const ScoredQuerySet& reduced, std::size_t k, std::uint64_t seed);

// Repeatedly drops the lower-MI member of the closest surviving pair (ties on
// MI drop the higher position) until k remain.
IndexList SuccessiveEliminationPositions(const RowMatrix& psis, const Vector& scores, std::size_t k);
Batch SuccessiveEliminationBatch(const ScoredQuerySet& reduced, std::size_t k);

struct AnnealingBudget {
  // Hard wall-clock limit; must be > 0.
  double seconds = 1.0;
  // When non-zero the temperature schedule runs over this many objective
  // evaluations (deterministic); otherwise it runs over elapsed time.
  std::size_t max_evaluations = 0;
};

struct AnnealingStats {
  std::size_t evaluations = 0;
  double best_objective = 0.0;
  double initial_objective = 0.0;
};

inline constexpr double kAnnealingInitialTemperature = 0.05;
inline constexpr double kAnnealingFinalRatio = 1e-4;

// Simulated annealing over k-subsets of the reduced set maximizing joint batch
// MI. Returns the best batch seen. k must be <= min(N, 20).
Batch AnnealingBatch(const ScoredQuerySet& reduced, std::size_t k, const RowMatrix& samples,
                     const AnnealingBudget& budget, std::uint64_t seed,
                     AnnealingStats* stats = nullptr);

}  // namespace batchpref

#endif  // BATCHPREF_BATCHGEN_BATCHGEN_HPP_
