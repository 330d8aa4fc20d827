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
#include <chrono>
#include <map>
#include <mutex>
#include <utility>

#include "dpp/dpp.hpp"

namespace batchpref {
namespace {

double CachedDefaultSigma(std::size_t d, std::size_t k) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(d, k);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, DefaultSigma(d, k)).first;
  return it->second;
}

}  // namespace

RowMatrix UnitBoxPsis(const RowMatrix& psis) {
  RowMatrix out(psis.rows(), psis.cols());
  for (Eigen::Index j = 0; j < psis.cols(); ++j) {
    const double lo = psis.col(j).minCoeff();
    const double range = psis.col(j).maxCoeff() - lo;
    if (range > 0.0) {
      out.col(j) = (psis.col(j).array() - lo) / range;
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

Batch DppBatch(const ScoredQuerySet& reduced, std::size_t k, const DppBatchOptions& options) {
  Require(k >= 1 && k <= reduced.size(), ErrorCode::kInvalidInput, "batch size k exceeds reduced size N");
  const auto start = std::chrono::steady_clock::now();
  // With k = 1 the mode is argmax q, whatever sigma is.
  double sigma = options.sigma;
  if (sigma <= 0.0) sigma = k >= 2 ? CachedDefaultSigma(reduced.dim(), k) : 1.0;
  const DppKernel kernel = BuildKernel(options.unit_box ? UnitBoxPsis(reduced.psis) : reduced.psis, reduced.scores, sigma, options.gamma, options.alpha);

  IndexList positions;
  if (options.algorithm == ModeAlgorithm::kMaxCoordinateRounding) {
    try {
      positions = MaxCoordinateRounding(kernel.ModeKernel(), k, options.mirror, options.seed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateKernel && e.code() != ErrorCode::kNumerical) throw;
      positions.clear();
    }
  }
  if (positions.empty()) positions = GreedyMode(kernel, k).positions;
  std::sort(positions.begin(), positions.end());
  Batch batch = MakeBatch(reduced, positions, BatchMethod::kDppMode);
  batch.generation_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return batch;
}

}  // namespace batchpref
