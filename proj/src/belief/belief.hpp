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
#ifndef BATCHPREF_BELIEF_BELIEF_HPP_
#define BATCHPREF_BELIEF_BELIEF_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "core/model.hpp"

namespace batchpref {

struct AdaptiveMetropolisConfig {
  int total_iterations = 60000;
  int burn_in = 10000;
  int thinning = 50;
  double initial_proposal_scale = 0.1;
  int adaptation_interval = 500;
  int target_sample_count = 1000;

  // Keeps burn-in and thinning at their defaults and sizes the chain so that
  // exactly sample_count samples survive.
  static AdaptiveMetropolisConfig ForSampleCount(int sample_count);

  // Throws kConfiguration when burn_in >= total_iterations or too few samples
  // survive thinning.
  void Validate() const;
};

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  int iterations = 0;
};

// Posterior over reward weights given preference responses, represented by
// samples from an adaptive Metropolis chain on the unit ball.
class BeliefState {
 public:
  BeliefState(std::size_t dim, std::uint64_t seed,
              AdaptiveMetropolisConfig config = AdaptiveMetropolisConfig{});

  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  const AdaptiveMetropolisConfig& config() const { return config_; }

  const std::vector<StoredResponse>& responses() const { return responses_; }
  void AddResponse(const PreferenceResponse& response, const Vector& psi);

  // Runs a fresh chain from the origin and stores its samples.
  void Resample();
  bool has_samples() const { return samples_.rows() > 0; }
  const RowMatrix& samples() const { return samples_; }
  const ChainDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  AdaptiveMetropolisConfig config_;
  std::vector<StoredResponse> responses_;
  RowMatrix samples_;
  ChainDiagnostics diagnostics_;
};

// Sum of log surrogate likelihoods; -infinity outside the unit ball.
double LogPosterior(const Vector& w, const std::vector<StoredResponse>& responses);

struct ChainResult {
  RowMatrix samples;  // M x d
  ChainDiagnostics diagnostics;
};

// Haario-style adaptive Metropolis: the proposal covariance is refreshed every
// adaptation_interval steps to (2.38^2 / d) (Cov + 1e-6 I) of the chain so far.
ChainResult RunAdaptiveMetropolis(std::size_t dim, const std::vector<StoredResponse>& responses,
                                  const AdaptiveMetropolisConfig& config, std::uint64_t seed);

// Throws kState when no samples are present.
Vector MeanWeight(const RowMatrix& samples);
Vector MeanWeight(const BeliefState& state);

}  // namespace batchpref

#endif  // BATCHPREF_BELIEF_BELIEF_HPP_
