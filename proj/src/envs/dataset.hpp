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
#ifndef BATCHPREF_ENVS_DATASET_HPP_
#define BATCHPREF_ENVS_DATASET_HPP_

#include <cstdint>
#include <string>

#include "core/model.hpp"
#include "envs/environment.hpp"

namespace batchpref {

// Samples 2K uniformly random action sequences from the environment's fixed
// initial state and pairs them into K queries. Query i draws from its own RNG
// stream derived from (seed, i). With standardize, every feature dimension is
// shifted and scaled to zero mean / unit standard deviation over all 2K
// trajectories and the transform is recorded in feature_stats.
QueryDataset GenerateDataset(const Environment& env, std::size_t count, std::uint64_t seed,
                             bool standardize);

// Same sampling, but features are transformed with the given stats instead of
// fresh ones. Used for held-out queries that must live in the learner's
// feature space.
QueryDataset GenerateQueriesWithStats(const Environment& env, std::size_t count,
                                      std::uint64_t seed, const FeatureStats& stats);

// Rebuilds the full query (states included) for dataset row i. Trajectory
// features are reported in the dataset's (possibly standardized) space.
Query MaterializeQuery(const Environment& env, const QueryDataset& dataset, std::size_t index);

Vector ApplyFeatureStats(const FeatureStats& stats, const Vector& raw);

// Binary container, little-endian:
//   bytes 0..3   magic "BPQD"
//   u32          format version (1)
//   u64          header length H
//   H bytes      UTF-8 JSON header {env_id, K, d, T, dim_x, dim_u, seed,
//                standardized, feature_mean, feature_scale}
//   K records of float64: initial_state[dim_x], actions_a[T*dim_u],
//                actions_b[T*dim_u], features_a[d], features_b[d]
// Throws kIo when the file exists and overwrite is false.
void SaveDataset(const QueryDataset& dataset, const std::string& path, bool overwrite);
QueryDataset LoadDataset(const std::string& path);

}  // namespace batchpref

#endif  // BATCHPREF_ENVS_DATASET_HPP_
