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
#ifndef BATCHPREF_ACQUISITION_ACQUISITION_HPP_
#define BATCHPREF_ACQUISITION_ACQUISITION_HPP_

#include <span>

#include "core/model.hpp"

namespace batchpref {

// The N individually most informative queries of a dataset.
struct ScoredQuerySet {
  IndexList indices;  // dataset indices, ordered by decreasing score
  RowMatrix psis;     // N x d
  Vector scores;      // mutual information in bits

  std::size_t size() const { return indices.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(psis.cols()); }
};

// Mutual information (bits) between the answer to psi and w, with the
// expectation over w taken over the posterior samples (M x d) and the softmax
// response model. Equals H(mean_w p) - mean_w H(p); clipped to [0, 1].
double MutualInformation(const Vector& psi, const RowMatrix& samples);

// MI for every row of psis (N x d).
Vector MutualInformationBatch(const RowMatrix& psis, const RowMatrix& samples);

// Top-N by MI, ties to the lower dataset index. Throws kInvalidInput if N > K.
ScoredQuerySet ReduceDataset(const QueryDataset& dataset, const RowMatrix& samples, std::size_t n);
// Same over an explicit psi matrix; indices refer to its rows.
ScoredQuerySet ReduceByScores(const RowMatrix& psis, const Vector& scores, std::size_t n);

inline constexpr std::size_t kMaxJointBatch = 20;

// I(w; I_1..I_k) for the selected rows of psis, with responses conditionally
// independent given w. All 2^k response patterns are enumerated, so k is
// capped at 20 (kInvalidInput beyond).
double JointBatchMI(std::span<const std::size_t> batch, const RowMatrix& psis,
                    const RowMatrix& samples);

// Precomputed per-query likelihood tables so repeated joint evaluations over
// the same candidate set (annealing) avoid recomputing sigmoids.
class JointMIEvaluator {
 public:
  JointMIEvaluator(const RowMatrix& psis, const RowMatrix& samples);

  double Evaluate(std::span<const std::size_t> batch) const;
  std::size_t candidates() const { return static_cast<std::size_t>(p_plus_.rows()); }

 private:
  void Recurse(std::span<const std::size_t> batch, std::size_t depth, const double* weights,
               std::vector<double>& scratch, double& entropy) const;

  RowMatrix p_plus_;           // N x M, P(I = +1 | w_m)
  Vector conditional_entropy_;  // N, mean_m H(p) in bits
};

}  // namespace batchpref

#endif  // BATCHPREF_ACQUISITION_ACQUISITION_HPP_
