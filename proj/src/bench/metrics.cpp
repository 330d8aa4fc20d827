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
#include <cmath>

#include "bench/bench.hpp"

namespace batchpref {

double Alignment(const Vector& w_true, const Vector& w_hat) {
  Require(w_true.size() == w_hat.size(), ErrorCode::kInvalidInput, "alignment dimension mismatch");
  const double na = w_true.norm();
  const double nb = w_hat.norm();
  Require(na > 0.0 && nb > 0.0, ErrorCode::kInvalidInput, "alignment is undefined for a zero vector");
  return std::clamp(w_true.dot(w_hat) / (na * nb), -1.0, 1.0);
}

double HoldoutLoglik(const RowMatrix& samples, const RowMatrix& psis, std::span<const int> choices) {
  Require(psis.rows() > 0, ErrorCode::kInvalidInput, "holdout must be nonempty");
  Require(static_cast<std::size_t>(psis.rows()) == choices.size(), ErrorCode::kInvalidInput,
          "holdout choices / psi count mismatch");
  Require(samples.rows() > 0, ErrorCode::kState, "no posterior samples");
  Require(samples.cols() == psis.cols(), ErrorCode::kInvalidInput, "holdout dimension mismatch");
  const Matrix margins = samples * psis.transpose();  // M x H
  double total = 0.0;
  for (Eigen::Index h = 0; h < margins.cols(); ++h) {
    const int choice = choices[static_cast<std::size_t>(h)];
    ValidateChoice(choice);
    double mean = 0.0;
    for (Eigen::Index m = 0; m < margins.rows(); ++m) mean += ResponseLikelihood(choice, margins(m, h));
    total += std::log(mean / static_cast<double>(margins.rows()));
  }
  return total / static_cast<double>(margins.cols());
}

double Auc(const LearningCurve& curve, CurveMetric metric) {
  Require(curve.points.size() >= 2, ErrorCode::kInsufficientData, "AUC needs at least two checkpoints");
  auto value = [&](const Checkpoint& c) {
    return metric == CurveMetric::kAlignment ? c.alignment : c.loglik;
  };
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const Checkpoint& a = curve.points[i - 1];
    const Checkpoint& b = curve.points[i];
    area += 0.5 * (value(a) + value(b)) * static_cast<double>(b.queries - a.queries);
  }
  return area;
}

}  // namespace batchpref
