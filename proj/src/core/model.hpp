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
#ifndef BATCHPREF_CORE_MODEL_HPP_
#define BATCHPREF_CORE_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/types.hpp"

namespace batchpref {

// Reward weights w, constrained to the closed unit ball.
class WeightVector {
 public:
  static constexpr double kNormTolerance = 1e-9;

  WeightVector() = default;
  // Throws kInvalidInput on non-finite entries or norm above 1 + 1e-9.
  explicit WeightVector(Vector w);

  const Vector& values() const { return w_; }
  std::size_t dim() const { return static_cast<std::size_t>(w_.size()); }
  double operator[](std::size_t i) const { return w_[static_cast<Eigen::Index>(i)]; }

 private:
  Vector w_;
};

struct Trajectory {
  Vector initial_state;
  RowMatrix actions;  // T x dim_u
  RowMatrix states;   // (T + 1) x dim_x
  Vector features;    // phi(xi)
};

struct Query {
  Trajectory traj_a;
  Trajectory traj_b;
  Vector psi;
};

enum class Responder { kSimulated, kHuman };

struct PreferenceResponse {
  std::size_t query_index = 0;
  int choice = 1;  // +1 prefers A, -1 prefers B
  Responder responder = Responder::kSimulated;
  double timestamp = 0.0;
};

// A response together with the psi it was given for; the posterior only ever
// reads the stored copy.
struct StoredResponse {
  PreferenceResponse response;
  Vector psi;
};

struct FeatureStats {
  Vector mean;
  Vector scale;
  bool standardized = false;
};

// Dataset of K queries sharing one environment and one initial state. Raw
// trajectories are kept as action sequences; states are recomputed on demand
// by rolling the environment forward.
struct QueryDataset {
  std::string env_id;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::size_t dim_x = 0;
  std::size_t dim_u = 0;
  std::size_t feature_dim = 0;
  FeatureStats feature_stats;

  Vector initial_state;
  RowMatrix actions_a;   // K x (T * dim_u)
  RowMatrix actions_b;   // K x (T * dim_u)
  RowMatrix features_a;  // K x d, standardized when feature_stats.standardized
  RowMatrix features_b;  // K x d
  RowMatrix psi;         // K x d, features_a - features_b

  std::size_t size() const { return static_cast<std::size_t>(psi.rows()); }
  Vector psi_row(std::size_t i) const { return psi.row(static_cast<Eigen::Index>(i)).transpose(); }

  // Recomputes psi from the stored features.
  void RefreshPsi();
  // Returns a copy that keeps only the listed feature dimensions.
  QueryDataset SelectFeatures(std::span<const std::size_t> dims) const;
};

// Clamp bound for logistic / exponential arguments.
inline constexpr double kExpClamp = 500.0;

Vector FeatureDiff(const Trajectory& a, const Trajectory& b);
double Reward(const WeightVector& w, const Trajectory& t);

// Softmax preference model P(I | w) = 1 / (1 + exp(-I w.psi)).
double ResponseLikelihood(int choice, const WeightVector& w, const Vector& psi);
double ResponseLikelihood(int choice, double w_dot_psi);

// Log-concave surrogate min(1, exp(I w.psi)) used by the posterior sampler.
double ApproxLikelihood(int choice, const WeightVector& w, const Vector& psi);
double ApproxLikelihood(int choice, double w_dot_psi);

void ValidateChoice(int choice);

}  // namespace batchpref

#endif  // BATCHPREF_CORE_MODEL_HPP_
