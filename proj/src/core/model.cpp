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
#include "core/model.hpp"

#include <algorithm>
#include <cmath>

namespace batchpref {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kState: return "state";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kDegenerateKernel: return "degenerate_kernel";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kConflict: return "conflict";
  }
  return "unknown";
}

WeightVector::WeightVector(Vector w) : w_(std::move(w)) {
  Require(w_.allFinite(), ErrorCode::kInvalidInput, "weight vector has non-finite entries");
  Require(w_.norm() <= 1.0 + kNormTolerance, ErrorCode::kInvalidInput,
          "weight vector lies outside the unit ball");
}

void ValidateChoice(int choice) {
  Require(choice == 1 || choice == -1, ErrorCode::kInvalidInput, "choice must be +1 or -1");
}

Vector FeatureDiff(const Trajectory& a, const Trajectory& b) {
  Require(a.features.size() == b.features.size(), ErrorCode::kInvalidInput,
          "feature dimension mismatch");
  return a.features - b.features;
}

double Reward(const WeightVector& w, const Trajectory& t) {
  Require(static_cast<Eigen::Index>(w.dim()) == t.features.size(), ErrorCode::kInvalidInput,
          "weight / feature dimension mismatch");
  return w.values().dot(t.features);
}

double ResponseLikelihood(int choice, double w_dot_psi) {
  const double z = std::clamp(-choice * w_dot_psi, -kExpClamp, kExpClamp);
  return 1.0 / (1.0 + std::exp(z));
}

double ResponseLikelihood(int choice, const WeightVector& w, const Vector& psi) {
  ValidateChoice(choice);
  Require(static_cast<Eigen::Index>(w.dim()) == psi.size(), ErrorCode::kInvalidInput,
          "weight / psi dimension mismatch");
  return ResponseLikelihood(choice, w.values().dot(psi));
}

double ApproxLikelihood(int choice, double w_dot_psi) {
  const double z = std::clamp(choice * w_dot_psi, -kExpClamp, kExpClamp);
  return std::min(1.0, std::exp(z));
}

double ApproxLikelihood(int choice, const WeightVector& w, const Vector& psi) {
  ValidateChoice(choice);
  Require(static_cast<Eigen::Index>(w.dim()) == psi.size(), ErrorCode::kInvalidInput,
          "weight / psi dimension mismatch");
  return ApproxLikelihood(choice, w.values().dot(psi));
}

void QueryDataset::RefreshPsi() { psi = features_a - features_b; }

QueryDataset QueryDataset::SelectFeatures(std::span<const std::size_t> dims) const {
  QueryDataset out = *this;
  const auto k = static_cast<Eigen::Index>(size());
  const auto nd = static_cast<Eigen::Index>(dims.size());
  out.features_a.resize(k, nd);
  out.features_b.resize(k, nd);
  out.feature_stats.mean.resize(nd);
  out.feature_stats.scale.resize(nd);
  for (Eigen::Index j = 0; j < nd; ++j) {
    const auto src = static_cast<Eigen::Index>(dims[static_cast<std::size_t>(j)]);
    Require(src < features_a.cols(), ErrorCode::kInvalidInput, "feature index out of range");
    out.features_a.col(j) = features_a.col(src);
    out.features_b.col(j) = features_b.col(src);
    out.feature_stats.mean[j] = feature_stats.mean.size() ? feature_stats.mean[src] : 0.0;
    out.feature_stats.scale[j] = feature_stats.scale.size() ? feature_stats.scale[src] : 1.0;
  }
  out.feature_dim = dims.size();
  out.RefreshPsi();
  return out;
}

}  // namespace batchpref
