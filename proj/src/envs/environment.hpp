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
#ifndef BATCHPREF_ENVS_ENVIRONMENT_HPP_
#define BATCHPREF_ENVS_ENVIRONMENT_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace batchpref {

// A deterministic dynamical system x' = f(x, u) over a fixed horizon, with a
// trajectory feature map.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual std::size_t dim_x() const = 0;
  virtual std::size_t dim_u() const = 0;
  virtual std::size_t horizon() const = 0;
  virtual std::size_t feature_dim() const = 0;

  // Per action dimension [lo, hi].
  virtual std::vector<std::pair<double, double>> action_bounds() const = 0;
  virtual Vector default_initial_state() const = 0;

  virtual Vector Step(const Vector& state, const Vector& action) const = 0;
  // states is (T + 1) x dim_x, actions is T x dim_u.
  virtual Vector Features(const RowMatrix& states, const RowMatrix& actions) const = 0;

  // Scripted positions of other agents per time step, for rendering. Empty by
  // default.
  virtual RowMatrix ScriptedPath() const { return {}; }
};

// Rolls the dynamics forward. actions is T x dim_u; throws kInvalidInput when
// the shape is wrong or an action leaves its bounds.
Trajectory Rollout(const Environment& env, const Vector& initial_state, const RowMatrix& actions);

// Driver: point car among three lanes with a scripted second car.
std::unique_ptr<Environment> MakeDriverEnv();
// Random stable linear system with quadratic-form features.
std::unique_ptr<Environment> MakeLinearSynthEnv(std::size_t feature_dim, std::uint64_t seed);

struct EnvInfo {
  std::string id;
  std::string description;
};

// Registered ids: "driver", "linear_synth" (d = 4, seed 0).
std::vector<EnvInfo> ListEnvironments();
// Throws kNotFound for an unknown id.
std::unique_ptr<Environment> MakeEnvironment(const std::string& id);

}  // namespace batchpref

#endif  // BATCHPREF_ENVS_ENVIRONMENT_HPP_
