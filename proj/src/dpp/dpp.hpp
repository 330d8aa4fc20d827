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
#ifndef BATCHPREF_DPP_DPP_HPP_
#define BATCHPREF_DPP_DPP_HPP_

#include <cstdint>
#include <vector>

#include "acquisition/acquisition.hpp"
#include "batchgen/batchgen.hpp"
#include "core/rng.hpp"

namespace batchpref {

// L-ensemble over a reduced query set: S_ij = exp(-|psi_i - psi_j|^2 / 2 sigma^2),
// L_ij = q_i^(gamma/alpha) S_ij q_j^(gamma/alpha).
struct DppKernel {
  Matrix similarity;
  Vector quality;
  Matrix L;
  double sigma = 1.0;
  double gamma = 1.0;
  double alpha = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(L.rows()); }
  // q_i^gamma S_ij q_j^gamma: the kernel whose volume the greedy mode search
  // maximizes. Independent of alpha, since Vol^alpha has the same maximizer.
  Matrix ModeKernel() const;
};

// Monte-Carlo estimate of the expected smallest pairwise distance among k
// points drawn uniformly from [0, 1]^d. Deterministic given seed.
double DefaultSigma(std::size_t d, std::size_t k, std::size_t trials = 1000, std::uint64_t seed = 0);

// Throws kInvalidInput on negative q or sigma <= 0.
DppKernel BuildKernel(const RowMatrix& psis, const Vector& q, double sigma, double gamma, double alpha);

struct GreedyModeResult {
  IndexList positions;             // in pick order
  std::vector<double> log_dets;    // log det of the running set after each non-fallback pick
  std::size_t fallback_picks = 0;  // picks made by priority because all dets were <= 0
};

// Greedy volume maximization with incremental Cholesky (Schur complement)
// updates: each step adds argmax_j det(L_{A+j}), ties to the lower index. When
// every candidate's determinant is (numerically) zero, the remaining picks go
// to the highest fallback_priority (ties lower index).
GreedyModeResult GreedyModeOnMatrix(const Matrix& L, std::size_t k, const Vector& fallback_priority);
GreedyModeResult GreedyMode(const DppKernel& kernel, std::size_t k);

struct ConditionedKernel {
  Matrix L;             // over remaining
  IndexList remaining;  // indices of the original ground set not in B
};

// Kernel of the DPP conditioned on B being included:
// L' = ([(L + I_Bbar)^-1]_Bbar)^-1 - I. Throws kNumerical (with a condition
// number estimate) when a matrix to invert is singular.
ConditionedKernel ConditionKernel(const Matrix& L, const IndexList& chosen);

// g(v) = sum_{|A| = k} det(L_A) prod_{i in A} v_i.
// Exhaustive evaluator, for N <= 22.
double GenPolyExhaustive(const Matrix& L, std::size_t k, const Vector& v);
// e_k of the eigenvalues of diag(sqrt v) L diag(sqrt v).
double GenPoly(const Matrix& L, std::size_t k, const Vector& v);

// Swap-chain MCMC for the k-DPP P(A) ~ det(L_A): drop a uniform member, add j
// with probability ~ det(L_{A - i + j}).
class KDppChain {
 public:
  // Starts from the greedy mode; throws kDegenerateKernel if it has zero volume.
  KDppChain(const Matrix& L, std::size_t k, std::uint64_t seed);
  KDppChain(const Matrix& L, IndexList start, std::uint64_t seed);

  // Points the chain at a new kernel of the same size, keeping its state.
  void SetKernel(const Matrix& L) { kernel_ = L; }
  const IndexList& state() const { return state_; }

  // One transition. If y is non-null it receives k times the transition
  // probabilities from A - i to A - i + j (zero for members of A - i).
  void Step(Vector* y = nullptr);

 private:
  Matrix kernel_;
  IndexList state_;
  std::size_t k_;
  Rng rng_;
};

// Runs the given number of transitions from the greedy-initialized state; result sorted.
IndexList SampleKDpp(const Matrix& L, std::size_t k, std::size_t steps, std::uint64_t seed);

struct MirrorDescentConfig {
  std::size_t iterations = 300;
  double step_size = 0.1;
  std::size_t mcmc_steps = 200;
  bool record_objective = false;  // fills log_g per iteration (costly)
};

struct MirrorDescentResult {
  Vector v;                   // sums to k
  std::vector<double> log_g;  // log g(v) before each iteration and after the last
};

// Stochastic mirror descent with entropy mirror map for
// max log g(v) s.t. v >= 0, sum v = k. Each iteration samples the v-weighted
// k-DPP by the swap chain and uses the low-variance surrogate y (k times the
// transition probabilities, averaged over the chain steps) in
// u = v + eta y, v = k u / sum(u).
MirrorDescentResult MirrorDescent(const Matrix& L, std::size_t k, const MirrorDescentConfig& config,
                                  std::uint64_t seed);

// Maximum coordinate rounding: solve the relaxation, keep argmax v, condition
// on it and recurse with k - 1. The k = 1 relaxation is solved exactly
// (argmax of the diagonal).
IndexList MaxCoordinateRounding(const Matrix& L, std::size_t k, const MirrorDescentConfig& config,
                                std::uint64_t seed);

enum class ModeAlgorithm { kGreedy, kMaxCoordinateRounding };

struct DppBatchOptions {
  ModeAlgorithm algorithm = ModeAlgorithm::kGreedy;
  double gamma = 1.0;
  double alpha = 1.0;
  double sigma = 0.0;  // <= 0: DefaultSigma(d, k)
  // Rescale every psi dimension to [0, 1] over the reduced set before
  // measuring similarity. DefaultSigma is a distance in the unit cube, so
  // without this it only fits psi that already span roughly [0, 1]^d.
  bool unit_box = true;
  MirrorDescentConfig mirror;
  std::uint64_t seed = 0;
};

// Kernel with q = MI scores, then the chosen mode approximation.
// UnitBoxPsis maps each column affinely onto [0, 1]; constant columns become 0.
RowMatrix UnitBoxPsis(const RowMatrix& psis);
Batch DppBatch(const ScoredQuerySet& reduced, std::size_t k, const DppBatchOptions& options = {});

double LogDetSubset(const Matrix& L, const IndexList& subset);

}  // namespace batchpref

#endif  // BATCHPREF_DPP_DPP_HPP_
