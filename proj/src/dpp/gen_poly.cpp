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
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "dpp/dpp.hpp"

namespace batchpref {
namespace {

void CheckArgs(const Matrix& L, std::size_t k, const Vector& v) {
  Require(L.rows() == L.cols(), ErrorCode::kInvalidInput, "kernel must be square");
  Require(v.size() == L.rows(), ErrorCode::kInvalidInput, "v must match kernel size");
  Require((v.array() >= 0.0).all(), ErrorCode::kInvalidInput, "v must be non-negative");
  Require(k <= static_cast<std::size_t>(L.rows()), ErrorCode::kInvalidInput, "k exceeds kernel size");
}

}  // namespace

double GenPolyExhaustive(const Matrix& L, std::size_t k, const Vector& v) {
  CheckArgs(L, k, v);
  const auto n = static_cast<std::size_t>(L.rows());
  Require(n <= 22, ErrorCode::kInvalidInput, "exhaustive evaluation limited to N <= 22");
  if (k == 0) return 1.0;
  IndexList subset(k);
  for (std::size_t i = 0; i < k; ++i) subset[i] = i;
  const auto kk = static_cast<Eigen::Index>(k);
  Matrix sub(kk, kk);
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (std::size_t a = 0; a < k; ++a) {
      weight *= v[static_cast<Eigen::Index>(subset[a])];
      for (std::size_t b = 0; b < k; ++b) {
        sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            L(static_cast<Eigen::Index>(subset[a]), static_cast<Eigen::Index>(subset[b]));
      }
    }
    if (weight != 0.0) total += weight * sub.partialPivLu().determinant();
    // Next subset in lexicographic order.
    std::size_t pos = k;
    while (pos > 0 && subset[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t i = pos; i < k; ++i) subset[i] = subset[i - 1] + 1;
  }
  return total;
}

double GenPoly(const Matrix& L, std::size_t k, const Vector& v) {
  CheckArgs(L, k, v);
  const Vector root = v.array().sqrt().matrix();
  const Matrix scaled = root.asDiagonal() * L * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scaled, Eigen::EigenvaluesOnly);
  Require(eig.info() == Eigen::Success, ErrorCode::kNumerical, "eigendecomposition failed");
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double lambda = std::max(0.0, eig.eigenvalues()[i]);
    for (std::size_t j = k; j >= 1; --j) e[j] += lambda * e[j - 1];
  }
  return e[k];
}

}  // namespace batchpref
