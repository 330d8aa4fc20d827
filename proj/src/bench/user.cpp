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

#include "bench/bench.hpp"

namespace batchpref {

NoiseModel ParseNoiseModel(const std::string& name) {
  if (name == "noiseless") return NoiseModel::kNoiseless;
  if (name == "softmax") return NoiseModel::kSoftmax;
  Fail(ErrorCode::kInvalidInput, "unknown noise model '" + name + "'");
}

const char* NoiseModelName(NoiseModel model) {
  return model == NoiseModel::kNoiseless ? "noiseless" : "softmax";
}

SimulatedUser::SimulatedUser(Vector w_true, NoiseModel noise, std::uint64_t seed)
    : w_true_(std::move(w_true)), noise_(noise), rng_(seed) {
  const double norm = w_true_.norm();
  Require(std::isfinite(norm) && norm > 0.0, ErrorCode::kInvalidInput,
          "true weights must be finite and nonzero");
  w_true_ /= norm;
}

int SimulatedUser::Respond(const Vector& psi) {
  Require(psi.size() == w_true_.size(), ErrorCode::kInvalidInput, "psi dimension mismatch");
  Require(psi.allFinite(), ErrorCode::kInvalidInput, "psi must be finite");
  const double margin = w_true_.dot(psi);
  if (noise_ == NoiseModel::kNoiseless) return margin >= 0.0 ? 1 : -1;
  return Uniform01(rng_) < ResponseLikelihood(1, margin) ? 1 : -1;
}

Vector RandomUnitVector(std::size_t dim, Rng& rng) {
  Require(dim >= 1, ErrorCode::kInvalidInput, "dimension must be >= 1");
  Vector v(static_cast<Eigen::Index>(dim));
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = StandardNormal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

}  // namespace batchpref
