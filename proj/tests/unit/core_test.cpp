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
#include <set>

#include "core/model.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

namespace batchpref {
namespace {

using testing::CodeOf;

TEST_SUITE("core") {

TEST_CASE("softmax likelihood matches the scalar logistic") {
  for (double x : {-30.0, -3.0, -0.5, 0.0, 0.25, 2.0, 17.0}) {
    const double expected = 1.0 / (1.0 + std::exp(-x));
    CHECK(ResponseLikelihood(1, x) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(ResponseLikelihood(-1, x) == doctest::Approx(1.0 - expected).epsilon(1e-12));
  }
  CHECK(ResponseLikelihood(1, 0.0) == 0.5);
}

TEST_CASE("likelihood stays finite at extreme margins") {
  CHECK(ResponseLikelihood(1, 1e6) == doctest::Approx(1.0));
  const double low = ResponseLikelihood(1, -1e6);
  CHECK(std::isfinite(low));
  CHECK(low >= 0.0);
  CHECK(low <= std::exp(-499.0));
}

TEST_CASE("vector overload agrees with the margin overload") {
  const WeightVector w(Vector::Constant(3, 0.4));
  Vector psi(3);
  psi << 1.0, -2.0, 0.5;
  const double margin = w.values().dot(psi);
  CHECK(ResponseLikelihood(-1, w, psi) == ResponseLikelihood(-1, margin));
  CHECK(ApproxLikelihood(1, w, psi) == ApproxLikelihood(1, margin));
}

TEST_CASE("surrogate likelihood is min(1, exp(I w.psi))") {
  CHECK(ApproxLikelihood(1, 0.3) == 1.0);
  CHECK(ApproxLikelihood(-1, 0.3) == doctest::Approx(std::exp(-0.3)));
  CHECK(ApproxLikelihood(1, -2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(ApproxLikelihood(-1, -2.0) == 1.0);
}

TEST_CASE("invalid choices are rejected") {
  CHECK(CodeOf([] { ValidateChoice(0); }) == ErrorCode::kInvalidInput);
  const WeightVector w(Vector::Zero(2));
  CHECK(CodeOf([&] { ResponseLikelihood(2, w, Vector::Ones(2)); }) == ErrorCode::kInvalidInput);
  ValidateChoice(1);
  ValidateChoice(-1);
}

TEST_CASE("weight vectors must lie in the closed unit ball") {
  CHECK(CodeOf([] { WeightVector(Vector::Constant(2, 0.8)); }) == ErrorCode::kInvalidInput);
  Vector nan = Vector::Zero(2);
  nan[1] = std::nan("");
  CHECK(CodeOf([&] { WeightVector{nan}; }) == ErrorCode::kInvalidInput);
  Vector unit = Vector::Zero(3);
  unit[0] = 1.0;
  CHECK(WeightVector(unit).dim() == 3);
}

TEST_CASE("feature difference and linear reward") {
  Trajectory a, b;
  a.features = Vector::LinSpaced(4, 0.0, 3.0);
  b.features = Vector::Constant(4, 1.0);
  const Vector psi = FeatureDiff(a, b);
  CHECK(psi[0] == -1.0);
  CHECK(psi[3] == 2.0);
  const WeightVector w(Vector::Constant(4, 0.5));
  CHECK(Reward(w, a) - Reward(w, b) == doctest::Approx(w.values().dot(psi)));
}

TEST_CASE("derived seeds are deterministic and distinct") {
  CHECK(DeriveSeed(7, {1, 2}) == DeriveSeed(7, {1, 2}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(DeriveSeed(7, {i}));
  CHECK(seen.size() == 1000);
  CHECK(DeriveSeed(7, {1, 2}) != DeriveSeed(7, {2, 1}));
}

TEST_CASE("uniform index covers its range") {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[UniformIndex(rng, 7)];
  for (int c : counts) CHECK(c == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("standard normal has unit variance") {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = StandardNormal(rng);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform01 stays in [0, 1)") {
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = Uniform01(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace batchpref
