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

#include "bench/bench.hpp"

namespace batchpref {

MethodKind ParseMethod(const std::string& name) {
  static const std::pair<const char*, MethodKind> kNames[] = {
      {"sequential", MethodKind::kSequential},
      {"greedy", MethodKind::kGreedy},
      {"medoids", MethodKind::kMedoids},
      {"boundary_medoids", MethodKind::kBoundaryMedoids},
      {"successive_elimination", MethodKind::kSuccessiveElimination},
      {"annealing", MethodKind::kAnnealing},
      {"dpp", MethodKind::kDpp},
      {"dpp_mcr", MethodKind::kDppMcr},
  };
  for (const auto& [n, kind] : kNames) {
    if (name == n) return kind;
  }
  Fail(ErrorCode::kInvalidInput, "unknown method '" + name + "'");
}

const char* MethodName(MethodKind kind) {
  switch (kind) {
    case MethodKind::kSequential: return "sequential";
    case MethodKind::kGreedy: return "greedy";
    case MethodKind::kMedoids: return "medoids";
    case MethodKind::kBoundaryMedoids: return "boundary_medoids";
    case MethodKind::kSuccessiveElimination: return "successive_elimination";
    case MethodKind::kAnnealing: return "annealing";
    case MethodKind::kDpp: return "dpp";
    case MethodKind::kDppMcr: return "dpp_mcr";
  }
  return "unknown";
}

IndexList SelectFromReduced(MethodKind kind, const ScoredQuerySet& reduced, const RowMatrix& samples,
                            std::size_t k, const SelectionOptions& options) {
  switch (kind) {
    case MethodKind::kGreedy: return GreedyBatch(reduced, k).indices;
    case MethodKind::kMedoids: return MedoidsBatch(reduced, k, options.seed).indices;
    case MethodKind::kBoundaryMedoids: return BoundaryMedoidsBatch(reduced, k, options.seed).indices;
    case MethodKind::kSuccessiveElimination: return SuccessiveEliminationBatch(reduced, k).indices;
    case MethodKind::kAnnealing:
      return AnnealingBatch(reduced, k, samples, options.annealing, options.seed).indices;
    case MethodKind::kDpp:
    case MethodKind::kDppMcr: {
      DppBatchOptions dpp;
      dpp.algorithm = kind == MethodKind::kDpp ? ModeAlgorithm::kGreedy : ModeAlgorithm::kMaxCoordinateRounding;
      dpp.mirror = options.mirror;
      dpp.seed = options.seed;
      return DppBatch(reduced, k, dpp).indices;
    }
    case MethodKind::kSequential: break;
  }
  Fail(ErrorCode::kInvalidInput, "method does not select from a reduced set");
}

IndexList SelectQueries(MethodKind kind, const QueryDataset& dataset, const RowMatrix& samples,
                        std::size_t k, std::size_t n, const SelectionOptions& options) {
  if (kind == MethodKind::kSequential) return ReduceDataset(dataset, samples, 1).indices;
  Require(k >= 1 && k <= n, ErrorCode::kInvalidInput, "need 1 <= k <= N");
  return SelectFromReduced(kind, ReduceDataset(dataset, samples, n), samples, k, options);
}

}  // namespace batchpref
