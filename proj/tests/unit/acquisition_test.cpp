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
#include <numeric>

#include "acquisition/acquisition.hpp"
#include "test_util.hpp"

namespace batchpref {
namespace {

using testing::CodeOf;

double Sigmoid(long double x) { return static_cast<double>(1.0L / (1.0L + std::exp(-x))); }

double EntropyBits(long double p) {
  long double h = 0;
  if (p > 0) h -= p * std::log2(p);
  if (p < 1) h -= (1 - p) * std::log2(1 - p);
  return static_cast<double>(h);
}

// Direct definition H(E p) - E H(p) in long double.
double NaiveMI(const Vector& psi, const RowMatrix& samples) {
  long double mean_p = 0, mean_h = 0;
  for (Eigen::Index m = 0; m < samples.rows(); ++m) {
    const long double p = Sigmoid(samples.row(m).dot(psi.transpose()));
    mean_p += p;
    mean_h += EntropyBits(p);
  }
  mean_p /= samples.rows();
  mean_h /= samples.rows();
  return std::clamp(EntropyBits(mean_p) - static_cast<double>(mean_h), 0.0, 1.0);
}

// Joint MI by explicit enumeration of response patterns.
double NaiveJointMI(const IndexList& batch, const RowMatrix& psis, const RowMatrix& samples) {
  const std::size_t k = batch.size();
  const auto m = samples.rows();
  long double joint = 0, cond = 0;
  for (std::size_t pattern = 0; pattern < (std::size_t{1} << k); ++pattern) {
    long double mean = 0;
    for (Eigen::Index s = 0; s < m; ++s) {
      long double prob = 1;
      for (std::size_t i = 0; i < k; ++i) {
        const long double p = Sigmoid(samples.row(s).dot(psis.row(static_cast<Eigen::Index>(batch[i]))));
        prob *= ((pattern >> i) & 1) ? p : 1 - p;
      }
      mean += prob;
    }
    mean /= m;
    if (mean > 0) joint -= mean * std::log2(mean);
  }
  for (std::size_t i : batch) {
    for (Eigen::Index s = 0; s < m; ++s) {
      cond += EntropyBits(Sigmoid(samples.row(s).dot(psis.row(static_cast<Eigen::Index>(i)))));
    }
  }
  return std::max(0.0, static_cast<double>(joint - cond / m));
}

TEST_SUITE("acquisition") {

TEST_CASE("single-query MI matches the direct definition") {
  Rng rng(1);
  const RowMatrix samples = testing::RandomBallSamples(rng, 257, 4);
  const RowMatrix psis = testing::RandomRows(rng, 70, 4, -3, 3);
  const Vector batch = MutualInformationBatch(psis, samples);
  for (Eigen::Index i = 0; i < psis.rows(); ++i) {
    const Vector psi = psis.row(i).transpose();
    const double naive = NaiveMI(psi, samples);
    CHECK(MutualInformation(psi, samples) == doctest::Approx(naive).epsilon(1e-9));
    CHECK(batch[i] == doctest::Approx(naive).epsilon(1e-9));
  }
}

TEST_CASE("MI is zero for psi = 0 and stays in [0, 1] at extreme scales") {
  Rng rng(2);
  const RowMatrix samples = testing::RandomBallSamples(rng, 100, 3);
  CHECK(MutualInformation(Vector::Zero(3), samples) == doctest::Approx(0.0).epsilon(1e-12));
  for (double scale : {1e-8, 1.0, 1e3, 1e6}) {
    const double mi = MutualInformation(Vector::Ones(3) * scale, samples);
    CHECK(std::isfinite(mi));
    CHECK(mi >= 0.0);
    CHECK(mi <= 1.0);
  }
  // Samples split evenly by a large psi: the answer reveals one full bit.
  RowMatrix split(2, 1);
  split << 0.5, -0.5;
  Vector psi(1);
  psi << 1e4;
  CHECK(MutualInformation(psi, split) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("MI is invariant to the sign of psi") {
  Rng rng(3);
  const RowMatrix samples = testing::RandomBallSamples(rng, 50, 2);
  Vector psi(2);
  psi << 1.3, -0.4;
  CHECK(MutualInformation(psi, samples) == doctest::Approx(MutualInformation(-psi, samples)).epsilon(1e-12));
}

TEST_CASE("joint MI matches explicit pattern enumeration") {
  Rng rng(4);
  const RowMatrix samples = testing::RandomBallSamples(rng, 40, 3);
  const RowMatrix psis = testing::RandomRows(rng, 12, 3, -4, 4);
  for (const IndexList& batch : {IndexList{0}, IndexList{1, 5}, IndexList{2, 3, 7, 11}, IndexList{0, 1, 2, 3, 4, 5, 6}}) {
    const double naive = NaiveJointMI(batch, psis, samples);
    CHECK(JointBatchMI(batch, psis, samples) == doctest::Approx(naive).epsilon(1e-9));
    JointMIEvaluator eval(psis, samples);
    CHECK(eval.Evaluate(batch) == doctest::Approx(naive).epsilon(1e-9));
  }
}

TEST_CASE("joint MI of one query equals single-query MI") {
  Rng rng(5);
  const RowMatrix samples = testing::RandomBallSamples(rng, 300, 4);
  const RowMatrix psis = testing::RandomRows(rng, 5, 4, -2, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    const IndexList b{i};
    CHECK(JointBatchMI(b, psis, samples) ==
          doctest::Approx(MutualInformation(psis.row(static_cast<Eigen::Index>(i)).transpose(), samples)).epsilon(1e-9));
  }
}

TEST_CASE("joint MI is monotone, subadditive, and bounded by k bits") {
  Rng rng(6);
  const RowMatrix samples = testing::RandomBallSamples(rng, 200, 3);
  const RowMatrix psis = testing::RandomRows(rng, 30, 3, -3, 3);
  JointMIEvaluator eval(psis, samples);
  for (int trial = 0; trial < 50; ++trial) {
    IndexList all(30);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t k = 1 + UniformIndex(rng, 6);
    IndexList batch(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    const double joint = eval.Evaluate(batch);
    double sum = 0.0;
    for (std::size_t i : batch) sum += eval.Evaluate(IndexList{i});
    CHECK(joint <= sum + 1e-9);
    CHECK(joint <= static_cast<double>(k) + 1e-12);
    IndexList bigger = batch;
    bigger.push_back(all[k]);
    CHECK(eval.Evaluate(bigger) >= joint - 1e-9);
  }
}

TEST_CASE("joint MI of a duplicated query is below twice its MI") {
  Rng rng(7);
  const RowMatrix samples = testing::RandomBallSamples(rng, 200, 2);
  RowMatrix psis(2, 2);
  psis << 1.5, 0.5, 1.5, 0.5;
  const double single = JointBatchMI(IndexList{0}, psis, samples);
  CHECK(JointBatchMI(IndexList{0, 1}, psis, samples) < 2.0 * single - 1e-3);
}

TEST_CASE("joint MI rejects k above 20") {
  Rng rng(8);
  const RowMatrix samples = testing::RandomBallSamples(rng, 4, 2);
  const RowMatrix psis = testing::RandomRows(rng, 25, 2);
  IndexList batch(21);
  std::iota(batch.begin(), batch.end(), std::size_t{0});
  CHECK(CodeOf([&] { JointBatchMI(batch, psis, samples); }) == ErrorCode::kInvalidInput);
  CHECK(CodeOf([&] { JointBatchMI(IndexList{30}, psis, samples); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("reduction keeps the top-N with ties to the lower index") {
  RowMatrix psis(6, 1);
  psis << 0, 1, 2, 3, 4, 5;
  Vector scores(6);
  scores << 0.2, 0.9, 0.5, 0.9, 0.1, 0.5;
  const ScoredQuerySet r = ReduceByScores(psis, scores, 4);
  CHECK(r.indices == IndexList{1, 3, 2, 5});
  CHECK(r.psis(2, 0) == 2.0);
  CHECK(r.scores[3] == 0.5);
  CHECK(CodeOf([&] { ReduceByScores(psis, scores, 7); }) == ErrorCode::kInvalidInput);
  CHECK(CodeOf([&] { ReduceByScores(psis, scores, 0); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("reduced set scores dominate the rest") {
  Rng rng(9);
  QueryDataset ds;
  ds.psi = testing::RandomRows(rng, 500, 3, -2, 2);
  const RowMatrix samples = testing::RandomBallSamples(rng, 100, 3);
  const ScoredQuerySet r = ReduceDataset(ds, samples, 50);
  const Vector all = MutualInformationBatch(ds.psi, samples);
  std::vector<bool> chosen(500, false);
  for (std::size_t i : r.indices) chosen[i] = true;
  const double cutoff = r.scores.minCoeff();
  for (std::size_t i = 0; i < 500; ++i) {
    if (!chosen[i]) CHECK(all[static_cast<Eigen::Index>(i)] <= cutoff);
  }
  for (Eigen::Index i = 1; i < r.scores.size(); ++i) CHECK(r.scores[i] <= r.scores[i - 1]);
}

TEST_CASE("mismatched dimensions are rejected") {
  Rng rng(10);
  const RowMatrix samples = testing::RandomBallSamples(rng, 10, 3);
  CHECK(CodeOf([&] { MutualInformation(Vector::Ones(2), samples); }) == ErrorCode::kInvalidInput);
  CHECK(CodeOf([&] { MutualInformationBatch(RowMatrix::Ones(3, 2), samples); }) == ErrorCode::kInvalidInput);
  CHECK(CodeOf([&] { MutualInformation(Vector::Ones(3), RowMatrix(0, 3)); }) == ErrorCode::kInvalidInput);
}

}  // TEST_SUITE

}  // namespace
}  // namespace batchpref
