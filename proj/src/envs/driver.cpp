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
#include <array>
#include <cmath>
#include <limits>

#include "envs/environment.hpp"

namespace batchpref {
namespace {

constexpr double kDt = 0.1;
constexpr std::size_t kHorizon = 5;
constexpr double kLaneWeight = 30.0;
constexpr double kCarWeight = 25.0;
constexpr double kSpeedRef = 0.8;
constexpr std::array<double, 3> kLanes = {-0.17, 0.0, 0.17};

// Ego starts between two lanes, slightly turned towards the middle lane where
// the other car drives.
constexpr std::array<double, 4> kEgoStart = {0.0, -0.11, 0.2, 0.7};
constexpr double kOtherX0 = 0.15;
constexpr double kOtherY = 0.0;
constexpr double kOtherSpeed = 0.5;

class DriverEnv final : public Environment {
 public:
  std::string id() const override { return "driver"; }
  std::size_t dim_x() const override { return 4; }
  std::size_t dim_u() const override { return 2; }
  std::size_t horizon() const override { return kHorizon; }
  std::size_t feature_dim() const override { return 4; }

  std::vector<std::pair<double, double>> action_bounds() const override {
    return {{-1.0, 1.0}, {-1.0, 1.0}};
  }

  Vector default_initial_state() const override {
    return Eigen::Map<const Vector>(kEgoStart.data(), 4);
  }

  // state (x, y, heading, speed); action (steering, acceleration)
  Vector Step(const Vector& s, const Vector& u) const override {
    Vector next(4);
    next[0] = s[0] + s[3] * std::cos(s[2]) * kDt;
    next[1] = s[1] + s[3] * std::sin(s[2]) * kDt;
    next[2] = s[2] + s[3] * u[0] * kDt;
    next[3] = std::clamp(s[3] + u[1] * kDt, 0.0, 1.0);
    return next;
  }

  Vector Features(const RowMatrix& states, const RowMatrix& /*actions*/) const override {
    const RowMatrix other = ScriptedPath();
    Vector f = Vector::Zero(4);
    const Eigen::Index steps = states.rows() - 1;
    for (Eigen::Index t = 1; t <= steps; ++t) {
      const double x = states(t, 0), y = states(t, 1), heading = states(t, 2), v = states(t, 3);
      double lane_offset = std::numeric_limits<double>::infinity();
      for (double c : kLanes) lane_offset = std::min(lane_offset, (y - c) * (y - c));
      const double dx = x - other(t, 0), dy = y - other(t, 1);
      const double s = std::sin(heading);
      f[0] += std::exp(-kLaneWeight * lane_offset);
      f[1] += (v - kSpeedRef) * (v - kSpeedRef);
      f[2] += s * s;
      f[3] += std::exp(-kCarWeight * (dx * dx + dy * dy));
    }
    return f / static_cast<double>(steps);
  }

  RowMatrix ScriptedPath() const override {
    RowMatrix path(kHorizon + 1, 2);
    for (std::size_t t = 0; t <= kHorizon; ++t) {
      path(static_cast<Eigen::Index>(t), 0) = kOtherX0 + kOtherSpeed * kDt * static_cast<double>(t);
      path(static_cast<Eigen::Index>(t), 1) = kOtherY;
    }
    return path;
  }
};

}  // namespace

std::unique_ptr<Environment> MakeDriverEnv() { return std::make_unique<DriverEnv>(); }

Trajectory Rollout(const Environment& env, const Vector& initial_state, const RowMatrix& actions) {
  const auto T = static_cast<Eigen::Index>(env.horizon());
  const auto du = static_cast<Eigen::Index>(env.dim_u());
  Require(initial_state.size() == static_cast<Eigen::Index>(env.dim_x()), ErrorCode::kInvalidInput,
          "initial state has wrong dimension");
  Require(actions.rows() == T && actions.cols() == du, ErrorCode::kInvalidInput,
          "action sequence has wrong shape");
  const auto bounds = env.action_bounds();
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index j = 0; j < du; ++j) {
      const double a = actions(t, j);
      const auto [lo, hi] = bounds[static_cast<std::size_t>(j)];
      Require(std::isfinite(a) && a >= lo && a <= hi, ErrorCode::kInvalidInput,
              "action out of bounds");
    }
  }
  Trajectory traj;
  traj.initial_state = initial_state;
  traj.actions = actions;
  traj.states.resize(T + 1, initial_state.size());
  traj.states.row(0) = initial_state.transpose();
  Vector s = initial_state;
  for (Eigen::Index t = 0; t < T; ++t) {
    s = env.Step(s, actions.row(t).transpose());
    traj.states.row(t + 1) = s.transpose();
  }
  traj.features = env.Features(traj.states, traj.actions);
  return traj;
}

}  // namespace batchpref
