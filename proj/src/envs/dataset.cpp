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
#include "envs/dataset.hpp"

#include <cmath>

#include "core/rng.hpp"

namespace batchpref {
namespace {

RowMatrix RandomActions(const Environment& env, Rng& rng) {
  const auto bounds = env.action_bounds();
  RowMatrix u(static_cast<Eigen::Index>(env.horizon()), static_cast<Eigen::Index>(env.dim_u()));
  for (Eigen::Index t = 0; t < u.rows(); ++t) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const auto [lo, hi] = bounds[static_cast<std::size_t>(j)];
      u(t, j) = UniformIn(rng, lo, hi);
    }
  }
  return u;
}

// Fills actions and raw features for count queries.
QueryDataset SampleRaw(const Environment& env, std::size_t count, std::uint64_t seed) {
  Require(count >= 1, ErrorCode::kInvalidInput, "dataset size K must be >= 1");
  QueryDataset ds;
  ds.env_id = env.id();
  ds.seed = seed;
  ds.horizon = env.horizon();
  ds.dim_x = env.dim_x();
  ds.dim_u = env.dim_u();
  ds.feature_dim = env.feature_dim();
  ds.initial_state = env.default_initial_state();
  const auto k = static_cast<Eigen::Index>(count);
  const auto width = static_cast<Eigen::Index>(ds.horizon * ds.dim_u);
  const auto d = static_cast<Eigen::Index>(ds.feature_dim);
  ds.actions_a.resize(k, width);
  ds.actions_b.resize(k, width);
  ds.features_a.resize(k, d);
  ds.features_b.resize(k, d);
  for (Eigen::Index i = 0; i < k; ++i) {
    Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(i)}));
    const RowMatrix ua = RandomActions(env, rng);
    const RowMatrix ub = RandomActions(env, rng);
    const Trajectory ta = Rollout(env, ds.initial_state, ua);
    const Trajectory tb = Rollout(env, ds.initial_state, ub);
    ds.actions_a.row(i) = Eigen::Map<const Vector>(ua.data(), width).transpose();
    ds.actions_b.row(i) = Eigen::Map<const Vector>(ub.data(), width).transpose();
    ds.features_a.row(i) = ta.features.transpose();
    ds.features_b.row(i) = tb.features.transpose();
  }
  return ds;
}

void Transform(QueryDataset& ds, const FeatureStats& stats) {
  ds.feature_stats = stats;
  if (stats.standardized) {
    const Eigen::RowVectorXd mean = stats.mean.transpose();
    const Eigen::RowVectorXd inv = stats.scale.cwiseInverse().transpose();
    ds.features_a = ((ds.features_a.rowwise() - mean).array().rowwise() * inv.array()).matrix();
    ds.features_b = ((ds.features_b.rowwise() - mean).array().rowwise() * inv.array()).matrix();
  }
  ds.RefreshPsi();
}

}  // namespace

Vector ApplyFeatureStats(const FeatureStats& stats, const Vector& raw) {
  if (!stats.standardized) return raw;
  return ((raw - stats.mean).array() / stats.scale.array()).matrix();
}

QueryDataset GenerateDataset(const Environment& env, std::size_t count, std::uint64_t seed,
                             bool standardize) {
  QueryDataset ds = SampleRaw(env, count, seed);
  FeatureStats stats;
  const auto d = static_cast<Eigen::Index>(ds.feature_dim);
  stats.mean = Vector::Zero(d);
  stats.scale = Vector::Ones(d);
  stats.standardized = standardize;
  if (standardize) {
    const double n = 2.0 * static_cast<double>(count);
    stats.mean = (ds.features_a.colwise().sum() + ds.features_b.colwise().sum()).transpose() / n;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double m = stats.mean[j];
      const double ss = (ds.features_a.col(j).array() - m).square().sum() +
                        (ds.features_b.col(j).array() - m).square().sum();
      const double sd = std::sqrt(ss / n);
      stats.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
  }
  Transform(ds, stats);
  return ds;
}

QueryDataset GenerateQueriesWithStats(const Environment& env, std::size_t count,
                                      std::uint64_t seed, const FeatureStats& stats) {
  QueryDataset ds = SampleRaw(env, count, seed);
  Transform(ds, stats);
  return ds;
}

Query MaterializeQuery(const Environment& env, const QueryDataset& ds, std::size_t index) {
  Require(index < ds.size(), ErrorCode::kInvalidInput, "query index out of range");
  Require(env.id() == ds.env_id, ErrorCode::kInvalidInput, "dataset belongs to another environment");
  const auto i = static_cast<Eigen::Index>(index);
  const auto T = static_cast<Eigen::Index>(ds.horizon);
  const auto du = static_cast<Eigen::Index>(ds.dim_u);
  const RowMatrix ua = Eigen::Map<const RowMatrix>(ds.actions_a.row(i).data(), T, du);
  const RowMatrix ub = Eigen::Map<const RowMatrix>(ds.actions_b.row(i).data(), T, du);
  Query q;
  q.traj_a = Rollout(env, ds.initial_state, ua);
  q.traj_b = Rollout(env, ds.initial_state, ub);
  q.traj_a.features = ApplyFeatureStats(ds.feature_stats, q.traj_a.features);
  q.traj_b.features = ApplyFeatureStats(ds.feature_stats, q.traj_b.features);
  q.psi = ds.psi_row(index);
  return q;
}

}  // namespace batchpref
