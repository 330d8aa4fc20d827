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
#include <cmath>
#include <numeric>

#include "batchgen/batchgen.hpp"
#include "core/rng.hpp"

namespace batchpref {

Batch AnnealingBatch(const ScoredQuerySet& reduced, std::size_t k, const RowMatrix& samples,
                     const AnnealingBudget& budget, std::uint64_t seed, AnnealingStats* stats) {
  const std::size_t n = reduced.size();
  Require(budget.seconds > 0.0, ErrorCode::kInvalidInput, "annealing budget must be positive");
  Require(k >= 1 && k <= n, ErrorCode::kInvalidInput, "batch size k exceeds reduced size N");
  Require(k <= kMaxJointBatch, ErrorCode::kInvalidInput, "annealing supports k <= 20");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  const JointMIEvaluator objective(reduced.psis, samples);
  Rng rng(seed);

  // Random initial k-subset (partial Fisher-Yates).
  IndexList pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + UniformIndex(rng, n - i)]);
  }
  IndexList current(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  IndexList outside(pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end());

  double current_value = objective.Evaluate(current);
  IndexList best = current;
  double best_value = current_value;
  std::size_t evaluations = 1;
  const double initial_value = current_value;

  const double log_ratio = std::log(kAnnealingFinalRatio);
  while (!outside.empty()) {
    double progress;
    if (budget.max_evaluations > 0) {
      if (evaluations >= budget.max_evaluations || elapsed() >= budget.seconds) break;
      progress = static_cast<double>(evaluations - 1) /
                 static_cast<double>(std::max<std::size_t>(budget.max_evaluations - 1, 1));
    } else {
      const double t = elapsed();
      if (t >= budget.seconds) break;
      progress = t / budget.seconds;
    }
    // Geometric cooling T = T0 * ratio^progress, ratio reached at exhaustion.
    const double temperature = kAnnealingInitialTemperature * std::exp(log_ratio * progress);

    const std::size_t in_slot = UniformIndex(rng, k);
    const std::size_t out_slot = UniformIndex(rng, outside.size());
    std::swap(current[in_slot], outside[out_slot]);
    const double value = objective.Evaluate(current);
    ++evaluations;
    const double delta = value - current_value;
    if (delta >= 0.0 || Uniform01(rng) < std::exp(delta / temperature)) {
      current_value = value;
      if (value > best_value) {
        best_value = value;
        best = current;
      }
    } else {
      std::swap(current[in_slot], outside[out_slot]);
    }
  }
  std::sort(best.begin(), best.end());
  if (stats != nullptr) {
    stats->evaluations = evaluations;
    stats->best_objective = best_value;
    stats->initial_objective = initial_value;
  }
  return MakeBatch(reduced, best, BatchMethod::kAnnealing);
}

}  // namespace batchpref
