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
#include "belief/belief.hpp"

#include <cmath>

#include "core/rng.hpp"

namespace batchpref {
namespace {

constexpr double kAdaptEpsilon = 1e-6;

// Responses stacked as rows I_i * psi_i, so the log posterior inside the ball is
// sum_i min(0, (R w)_i).
RowMatrix SignedPsiMatrix(const std::vector<StoredResponse>& responses, std::size_t dim) {
  RowMatrix r(static_cast<Eigen::Index>(responses.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < responses.size(); ++i) {
    r.row(static_cast<Eigen::Index>(i)) =
        static_cast<double>(responses[i].response.choice) * responses[i].psi.transpose();
  }
  return r;
}

double LogPosteriorInside(const RowMatrix& signed_psi, const Vector& w) {
  if (signed_psi.rows() == 0) return 0.0;
  const Vector z = signed_psi * w;
  // log min(1, exp(clamp(z))) == min(0, clamp(z))
  return z.array().max(-kExpClamp).min(0.0).sum();
}

}  // namespace

AdaptiveMetropolisConfig AdaptiveMetropolisConfig::ForSampleCount(int sample_count) {
  AdaptiveMetropolisConfig c;
  c.target_sample_count = sample_count;
  c.total_iterations = c.burn_in + c.thinning * sample_count;
  return c;
}

void AdaptiveMetropolisConfig::Validate() const {
  Require(target_sample_count >= 1, ErrorCode::kConfiguration, "sample count must be >= 1");
  Require(thinning >= 1, ErrorCode::kConfiguration, "thinning must be >= 1");
  Require(burn_in >= 0 && burn_in < total_iterations, ErrorCode::kConfiguration,
          "burn_in must be smaller than total_iterations");
  Require((total_iterations - burn_in) / thinning >= target_sample_count, ErrorCode::kConfiguration,
          "too few iterations survive burn-in and thinning");
  Require(initial_proposal_scale > 0.0, ErrorCode::kConfiguration,
          "initial proposal scale must be positive");
  Require(adaptation_interval >= 1, ErrorCode::kConfiguration, "adaptation interval must be >= 1");
}

BeliefState::BeliefState(std::size_t dim, std::uint64_t seed, AdaptiveMetropolisConfig config)
    : dim_(dim), seed_(seed), config_(config) {
  Require(dim >= 1, ErrorCode::kInvalidInput, "belief dimension must be >= 1");
  config_.Validate();
}

void BeliefState::AddResponse(const PreferenceResponse& response, const Vector& psi) {
  ValidateChoice(response.choice);
  Require(psi.size() == static_cast<Eigen::Index>(dim_), ErrorCode::kInvalidInput,
          "psi dimension mismatch");
  Require(psi.allFinite(), ErrorCode::kInvalidInput, "psi has non-finite entries");
  responses_.push_back({response, psi});
}

void BeliefState::Resample() {
  ChainResult r = RunAdaptiveMetropolis(dim_, responses_, config_, seed_);
  samples_ = std::move(r.samples);
  diagnostics_ = r.diagnostics;
}

double LogPosterior(const Vector& w, const std::vector<StoredResponse>& responses) {
  if (w.norm() > 1.0) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (const auto& r : responses) {
    acc += std::log(ApproxLikelihood(r.response.choice, w.dot(r.psi)));
  }
  return acc;
}

ChainResult RunAdaptiveMetropolis(std::size_t dim, const std::vector<StoredResponse>& responses,
                                  const AdaptiveMetropolisConfig& config, std::uint64_t seed) {
  config.Validate();
  const auto d = static_cast<Eigen::Index>(dim);
  const RowMatrix signed_psi = SignedPsiMatrix(responses, dim);
  const double scale_d = 2.38 * 2.38 / static_cast<double>(dim);

  Rng rng(seed);
  Vector current = Vector::Zero(d);
  double current_lp = LogPosteriorInside(signed_psi, current);

  Matrix chol = Matrix::Identity(d, d) * config.initial_proposal_scale;
  Vector running_mean = Vector::Zero(d);
  Matrix running_m2 = Matrix::Zero(d, d);
  long long history = 0;

  ChainResult out;
  out.samples.resize(config.target_sample_count, d);
  int stored = 0;
  long long accepted = 0;
  Vector z(d);

  for (int it = 0; it < config.total_iterations; ++it) {
    for (Eigen::Index j = 0; j < d; ++j) z[j] = StandardNormal(rng);
    const Vector proposal = current + chol * z;
    const double u = Uniform01(rng);
    if (proposal.squaredNorm() <= 1.0) {
      const double lp = LogPosteriorInside(signed_psi, proposal);
      if (lp >= current_lp || u < std::exp(lp - current_lp)) {
        current = proposal;
        current_lp = lp;
        ++accepted;
      }
    }

    // Welford update of the chain's mean and scatter.
    ++history;
    const Vector delta = current - running_mean;
    running_mean += delta / static_cast<double>(history);
    running_m2 += delta * (current - running_mean).transpose();

    if ((it + 1) % config.adaptation_interval == 0 && history > 1) {
      Matrix cov = running_m2 / static_cast<double>(history - 1);
      cov.diagonal().array() += kAdaptEpsilon;
      Eigen::LLT<Matrix> llt(scale_d * cov);
      if (llt.info() == Eigen::Success) chol = llt.matrixL();
    }

    if (it >= config.burn_in && (it - config.burn_in) % config.thinning == 0 &&
        stored < config.target_sample_count) {
      out.samples.row(stored++) = current.transpose();
    }
  }
  out.diagnostics.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(config.total_iterations);
  out.diagnostics.iterations = config.total_iterations;
  return out;
}

Vector MeanWeight(const RowMatrix& samples) {
  Require(samples.rows() > 0, ErrorCode::kState, "no posterior samples");
  return samples.colwise().mean().transpose();
}

Vector MeanWeight(const BeliefState& state) { return MeanWeight(state.samples()); }

}  // namespace batchpref
