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

#include <Eigen/Cholesky>

#include "dpp/dpp.hpp"

namespace batchpref {

KDppChain::KDppChain(const Matrix& L, std::size_t k, std::uint64_t seed)
    : kernel_(L), k_(k), rng_(seed) {
  Require(L.rows() == L.cols(), ErrorCode::kInvalidInput, "kernel must be square");
  Require(k >= 1 && k <= static_cast<std::size_t>(L.rows()), ErrorCode::kInvalidInput,
          "k must be in [1, N]");
  const GreedyModeResult start = GreedyModeOnMatrix(L, k, L.diagonal());
  if (start.fallback_picks > 0) {
    Fail(ErrorCode::kDegenerateKernel, "kernel has no k-subset of positive volume");
  }
  state_ = start.positions;
}

KDppChain::KDppChain(const Matrix& L, IndexList start, std::uint64_t seed)
    : kernel_(L), state_(std::move(start)), k_(state_.size()), rng_(seed) {
  Require(L.rows() == L.cols(), ErrorCode::kInvalidInput, "kernel must be square");
  Require(k_ >= 1 && k_ <= static_cast<std::size_t>(L.rows()), ErrorCode::kInvalidInput,
          "start state size must be in [1, N]");
  for (std::size_t i : state_) {
    Require(i < static_cast<std::size_t>(L.rows()), ErrorCode::kInvalidInput, "start index out of range");
  }
}

void KDppChain::Step(Vector* y) {
  const Eigen::Index n = kernel_.rows();
  const std::size_t slot = UniformIndex(rng_, k_);
  IndexList rest;
  rest.reserve(k_ - 1);
  for (std::size_t a = 0; a < k_; ++a) {
    if (a != slot) rest.push_back(state_[a]);
  }

  // det(L_{rest + j}) / det(L_rest) = L_jj - L_{j,rest} L_rest^-1 L_{rest,j}.
  Vector weights = kernel_.diagonal();
  if (!rest.empty()) {
    Eigen::LLT<Matrix> llt(kernel_(rest, rest));
    if (llt.info() != Eigen::Success) {
      if (y != nullptr) {
        y->setZero(n);
        for (std::size_t i : state_) (*y)[static_cast<Eigen::Index>(i)] = 1.0;
      }
      return;
    }
    const Matrix cross = llt.matrixL().solve(Matrix(kernel_(rest, Eigen::all)));
    weights -= cross.colwise().squaredNorm().transpose();
    for (std::size_t i : rest) weights[static_cast<Eigen::Index>(i)] = 0.0;
  }
  weights = weights.cwiseMax(0.0);
  const double total = weights.sum();
  if (!(total > 0.0)) {
    if (y != nullptr) {
      y->setZero(n);
      for (std::size_t i : state_) (*y)[static_cast<Eigen::Index>(i)] = 1.0;
    }
    return;
  }
  double u = Uniform01(rng_) * total;
  Eigen::Index pick = -1;
  Eigen::Index last_positive = 0;
  for (Eigen::Index j = 0; j < n && pick < 0; ++j) {
    if (weights[j] <= 0.0) continue;
    last_positive = j;
    u -= weights[j];
    if (u < 0.0) pick = j;
  }
  if (pick < 0) pick = last_positive;
  state_[slot] = static_cast<std::size_t>(pick);
  if (y != nullptr) *y = weights * (static_cast<double>(k_) / total);
}

IndexList SampleKDpp(const Matrix& L, std::size_t k, std::size_t steps, std::uint64_t seed) {
  KDppChain chain(L, k, seed);
  for (std::size_t s = 0; s < steps; ++s) chain.Step();
  IndexList out = chain.state();
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace batchpref
