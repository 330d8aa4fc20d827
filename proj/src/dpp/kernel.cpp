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
#include <limits>

#include "dpp/dpp.hpp"

namespace batchpref {

Matrix DppKernel::ModeKernel() const {
  const Vector w = quality.array().pow(gamma).matrix();
  return w.asDiagonal() * similarity * w.asDiagonal();
}

double DefaultSigma(std::size_t d, std::size_t k, std::size_t trials, std::uint64_t seed) {
  Require(d >= 1, ErrorCode::kInvalidInput, "dimension must be >= 1");
  Require(k >= 2, ErrorCode::kInvalidInput, "need at least two points for a nearest distance");
  Require(trials >= 1, ErrorCode::kInvalidInput, "need at least one trial");
  Rng rng(seed);
  RowMatrix pts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  double total = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = Uniform01(rng);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < pts.rows(); ++j) {
        best = std::min(best, (pts.row(i) - pts.row(j)).squaredNorm());
      }
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(trials);
}

DppKernel BuildKernel(const RowMatrix& psis, const Vector& q, double sigma, double gamma, double alpha) {
  Require(q.size() == psis.rows(), ErrorCode::kInvalidInput, "quality / psi count mismatch");
  Require((q.array() >= 0.0).all(), ErrorCode::kInvalidInput, "quality scores must be non-negative");
  Require(sigma > 0.0, ErrorCode::kInvalidInput, "sigma must be positive");
  Require(gamma >= 0.0, ErrorCode::kInvalidInput, "gamma must be non-negative");
  Require(alpha > 0.0, ErrorCode::kInvalidInput, "alpha must be positive");
  const Eigen::Index n = psis.rows();
  DppKernel kernel;
  kernel.sigma = sigma;
  kernel.gamma = gamma;
  kernel.alpha = alpha;
  kernel.quality = q;
  kernel.similarity.resize(n, n);
  const double denom = 2.0 * sigma * sigma;
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel.similarity(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = std::exp(-(psis.row(i) - psis.row(j)).squaredNorm() / denom);
      kernel.similarity(i, j) = kernel.similarity(j, i) = s;
    }
  }
  // gamma = 0 must give L = S even where q = 0, so avoid 0^0 ambiguity.
  const Vector w = gamma == 0.0 ? Vector::Ones(n) : Vector(q.array().pow(gamma / alpha).matrix());
  kernel.L = w.asDiagonal() * kernel.similarity * w.asDiagonal();
  return kernel;
}

double LogDetSubset(const Matrix& L, const IndexList& subset) {
  if (subset.empty()) return 0.0;
  const auto m = static_cast<Eigen::Index>(subset.size());
  Matrix sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      sub(a, b) = L(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]),
                    static_cast<Eigen::Index>(subset[static_cast<std::size_t>(b)]));
    }
  }
  Eigen::LLT<Matrix> llt(sub);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Vector diag = Matrix(llt.matrixL()).diagonal();
  if ((diag.array() <= 0.0).any()) return -std::numeric_limits<double>::infinity();
  return 2.0 * diag.array().log().sum();
}

}  // namespace batchpref
