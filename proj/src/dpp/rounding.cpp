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

#include "dpp/dpp.hpp"

namespace batchpref {
namespace {

Eigen::Index ArgMax(const Vector& x) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

}  // namespace

IndexList MaxCoordinateRounding(const Matrix& L, std::size_t k, const MirrorDescentConfig& config,
                                std::uint64_t seed) {
  Require(L.rows() == L.cols(), ErrorCode::kInvalidInput, "kernel must be square");
  Require(k >= 1 && k <= static_cast<std::size_t>(L.rows()), ErrorCode::kInvalidInput,
          "k must be in [1, N]");
  Matrix current = L;
  IndexList original(static_cast<std::size_t>(L.rows()));
  for (std::size_t i = 0; i < original.size(); ++i) original[i] = i;

  IndexList picks;
  for (std::size_t left = k; left >= 1; --left) {
    Eigen::Index j;
    if (left == 1) {
      j = ArgMax(current.diagonal());
    } else {
      const MirrorDescentConfig round_config{config.iterations, config.step_size, config.mcmc_steps, false};
      j = ArgMax(MirrorDescent(current, left, round_config, DeriveSeed(seed, {left})).v);
    }
    picks.push_back(original[static_cast<std::size_t>(j)]);
    if (left == 1) break;
    ConditionedKernel next = ConditionKernel(current, {static_cast<std::size_t>(j)});
    IndexList remapped;
    remapped.reserve(next.remaining.size());
    for (std::size_t r : next.remaining) remapped.push_back(original[r]);
    original = std::move(remapped);
    current = std::move(next.L);
  }
  return picks;
}

}  // namespace batchpref
