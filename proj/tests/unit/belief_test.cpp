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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "belief/belief.hpp"
#include "test_util.hpp"

namespace batchpref {
namespace {

using testing::CodeOf;

StoredResponse Stored(int choice, Vector psi) {
  StoredResponse r;
  r.response.choice = choice;
  r.psi = std::move(psi);
  return r;
}

// Posterior mean of the surrogate posterior on the unit disk by midpoint
// quadrature.
Vector GridPosteriorMean(const std::vector<StoredResponse>& responses) {
  const int n = 800;
  const double h = 2.0 / n;
  double z = 0.0;
  Vector acc = Vector::Zero(2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vector w(2);
      w << -1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h;
      if (w.norm() > 1.0) continue;
      double weight = 1.0;
      for (const auto& r : responses) weight *= std::min(1.0, std::exp(r.response.choice * w.dot(r.psi)));
      z += weight;
      acc += weight * w;
    }
  }
  return acc / z;
}

TEST_SUITE("belief") {

TEST_CASE("configuration validation") {
  AdaptiveMetropolisConfig c;
  c.Validate();
  CHECK((c.total_iterations - c.burn_in) / c.thinning == 1000);
  c.burn_in = c.total_iterations;
  CHECK(CodeOf([&] { c.Validate(); }) == ErrorCode::kConfiguration);
  const auto sized = AdaptiveMetropolisConfig::ForSampleCount(200);
  sized.Validate();
  CHECK((sized.total_iterations - sized.burn_in) / sized.thinning == 200);
}

TEST_CASE("log posterior is minus infinity outside the ball") {
  std::vector<StoredResponse> rs{Stored(1, Vector::Ones(2))};
  Vector out(2);
  out << 0.9, 0.9;
  CHECK(LogPosterior(out, rs) == -std::numeric_limits<double>::infinity());
  Vector in(2);
  in << -0.3, 0.1;
  CHECK(LogPosterior(in, rs) == doctest::Approx(-0.2));
  CHECK(LogPosterior(-in, rs) == 0.0);
}

TEST_CASE("prior samples cover the unit ball uniformly") {
  BeliefState belief(2, 17);
  belief.Resample();
  const RowMatrix& s = belief.samples();
  REQUIRE(s.rows() == 1000);
  CHECK(s.rowwise().norm().maxCoeff() <= 1.0);
  CHECK(MeanWeight(belief).norm() < 0.1);
  // For the uniform disk E|w|^2 = 1/2.
  CHECK(s.rowwise().squaredNorm().mean() == doctest::Approx(0.5).epsilon(0.1));
  CHECK(belief.diagnostics().acceptance_rate > 0.05);
}

TEST_CASE("chain mean matches quadrature of the surrogate posterior") {
  Rng rng(4);
  std::vector<StoredResponse> rs;
  Vector w_true(2);
  w_true << 0.6, -0.8;
  for (int i = 0; i < 12; ++i) {
    Vector psi(2);
    psi << UniformIn(rng, -3, 3), UniformIn(rng, -3, 3);
    rs.push_back(Stored(w_true.dot(psi) >= 0 ? 1 : -1, psi));
  }
  const Vector oracle = GridPosteriorMean(rs);
  AdaptiveMetropolisConfig config;
  config.total_iterations = 210000;
  config.target_sample_count = 4000;
  Vector mean = Vector::Zero(2);
  const int chains = 4;
  for (int c = 0; c < chains; ++c) {
    mean += MeanWeight(RunAdaptiveMetropolis(2, rs, config, 100 + c).samples);
  }
  mean /= chains;
  CHECK((mean - oracle).norm() < 0.03);
}

TEST_CASE("responses are stored with their psi") {
  BeliefState belief(3, 1);
  PreferenceResponse r;
  r.choice = -1;
  belief.AddResponse(r, Vector::Ones(3));
  REQUIRE(belief.responses().size() == 1);
  CHECK(belief.responses()[0].psi == Vector::Ones(3));
  r.choice = 0;
  CHECK(CodeOf([&] { belief.AddResponse(r, Vector::Ones(3)); }) == ErrorCode::kInvalidInput);
  r.choice = 1;
  CHECK(CodeOf([&] { belief.AddResponse(r, Vector::Ones(2)); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("resampling is deterministic for a fixed seed") {
  BeliefState a(4, 9), b(4, 9), c(4, 10);
  a.Resample();
  b.Resample();
  c.Resample();
  CHECK(a.samples() == b.samples());
  CHECK(a.samples() != c.samples());
}

TEST_CASE("mean weight without samples is a state error") {
  BeliefState belief(2, 0);
  CHECK(CodeOf([&] { MeanWeight(belief); }) == ErrorCode::kState);
}

TEST_CASE("posterior concentrates towards the true weights") {
  Rng rng(8);
  Vector w_true(3);
  w_true << 0.5, -0.5, 0.7;
  w_true.normalize();
  BeliefState belief(3, 2);
  for (int i = 0; i < 60; ++i) {
    Vector psi(3);
    for (int j = 0; j < 3; ++j) psi[j] = UniformIn(rng, -2, 2);
    PreferenceResponse r;
    r.choice = w_true.dot(psi) >= 0 ? 1 : -1;
    belief.AddResponse(r, psi);
  }
  belief.Resample();
  const Vector m = MeanWeight(belief);
  CHECK(m.dot(w_true) / m.norm() > 0.9);
}

}  // TEST_SUITE

}  // namespace
}  // namespace batchpref
