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

#include <cmath>

#include "dpp/dpp.hpp"

namespace batchpref {

MirrorDescentResult MirrorDescent(const Matrix& L, std::size_t k, const MirrorDescentConfig& config,
                                  std::uint64_t seed) {
  const Eigen::Index n = L.rows();
  Require(L.rows() == L.cols(), ErrorCode::kInvalidInput, "kernel must be square");
  Require(k >= 1 && k <= static_cast<std::size_t>(n), ErrorCode::kInvalidInput, "k must be in [1, N]");
  Require(config.step_size > 0.0, ErrorCode::kInvalidInput, "step size must be positive");
  Require(config.mcmc_steps >= 1, ErrorCode::kInvalidInput, "need at least one chain step");

  const double kd = static_cast<double>(k);
  MirrorDescentResult result;
  result.v = Vector::Constant(n, kd / static_cast<double>(n));
  auto record = [&] {
    if (config.record_objective) result.log_g.push_back(std::log(GenPoly(L, k, result.v)));
  };

  // The chain is warm-started across iterations; the target drifts slowly.
  KDppChain chain(L, k, seed);
  Vector y(n);
  Vector y_mean(n);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    record();
    const Vector root = result.v.array().sqrt().matrix();
    chain.SetKernel(root.asDiagonal() * L * root.asDiagonal());
    y_mean.setZero();
    for (std::size_t s = 0; s < config.mcmc_steps; ++s) {
      chain.Step(&y);
      y_mean += y;
    }
    y_mean /= static_cast<double>(config.mcmc_steps);
    const Vector u = result.v + config.step_size * y_mean;
    result.v = (kd / u.sum()) * u;
    result.v = result.v.cwiseMax(1e-12);
  }
  record();
  return result;
}

}  // namespace batchpref
