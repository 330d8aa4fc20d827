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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "dpp/dpp.hpp"
#include "test_util.hpp"

namespace batchpref {
namespace {

using testing::CodeOf;
using testing::DetSubset;
using testing::ForEachSubset;

IndexList Complement(std::size_t n, const IndexList& s) {
  IndexList out;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(s.begin(), s.end(), i) == s.end()) out.push_back(i);
  }
  return out;
}

// Exact k-DPP probabilities by enumeration, keyed by sorted subset.
std::map<IndexList, double> ExactKDpp(const Matrix& L, std::size_t k) {
  std::map<IndexList, double> p;
  double z = 0.0;
  ForEachSubset(static_cast<std::size_t>(L.rows()), k, [&](const IndexList& s) {
    const double d = std::max(0.0, DetSubset(L, s));
    p[s] = d;
    z += d;
  });
  for (auto& [s, v] : p) v /= z;
  return p;
}

Matrix Scaled(const Matrix& L, const Vector& v) {
  const Vector r = v.cwiseSqrt();
  return r.asDiagonal() * L * r.asDiagonal();
}

// Exact entropic mirror ascent on log g over {v >= 0, sum v = k}, with the
// gradient from exhaustive enumeration.
Vector ExactRelaxationOptimum(const Matrix& L, std::size_t k) {
  const auto n = static_cast<std::size_t>(L.rows());
  Vector v = Vector::Constant(static_cast<Eigen::Index>(n), static_cast<double>(k) / static_cast<double>(n));
  for (int it = 0; it < 4000; ++it) {
    Vector grad = Vector::Zero(v.size());
    double g = 0.0;
    ForEachSubset(n, k, [&](const IndexList& s) {
      double term = DetSubset(L, s);
      for (std::size_t i : s) term *= v[static_cast<Eigen::Index>(i)];
      g += term;
      for (std::size_t i : s) grad[static_cast<Eigen::Index>(i)] += term / v[static_cast<Eigen::Index>(i)];
    });
    grad /= g;
    v = (v.array() * (0.05 * grad.array()).exp()).matrix();
    v *= static_cast<double>(k) / v.sum();
  }
  return v;
}

TEST_SUITE("dpp") {

TEST_CASE("default sigma matches closed-form and offline estimates") {
  CHECK(DefaultSigma(1, 2, 1000, 0) == doctest::Approx(1.0 / 3.0).epsilon(0.06));
  CHECK(std::abs(DefaultSigma(1, 2, 1000, 0) - 1.0 / 3.0) <= 0.02);
  CHECK(std::abs(DefaultSigma(2, 2, 1000, 0) - 0.5214) <= 0.03);
  CHECK(DefaultSigma(3, 10, 1000, 5) == DefaultSigma(3, 10, 1000, 5));
  // More points in the same cube are closer together.
  CHECK(DefaultSigma(2, 10) < DefaultSigma(2, 3));
}

TEST_CASE("kernel entries match a scalar loop") {
  Rng rng(1);
  const RowMatrix psis = testing::RandomRows(rng, 9, 3);
  Vector q(9);
  for (int i = 0; i < 9; ++i) q[i] = Uniform01(rng);
  const double sigma = 0.7, gamma = 1.5, alpha = 2.0;
  const DppKernel kernel = BuildKernel(psis, q, sigma, gamma, alpha);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) d2 += (psis(i, c) - psis(j, c)) * (psis(i, c) - psis(j, c));
      const double s = std::exp(-d2 / (2 * sigma * sigma));
      CHECK(kernel.similarity(i, j) == doctest::Approx(s).epsilon(1e-12));
      const double l = std::pow(q[i], gamma / alpha) * s * std::pow(q[j], gamma / alpha);
      CHECK(kernel.L(i, j) == doctest::Approx(l).epsilon(1e-12));
      const double mode = std::pow(q[i], gamma) * s * std::pow(q[j], gamma);
      CHECK(kernel.ModeKernel()(i, j) == doctest::Approx(mode).epsilon(1e-12));
    }
    CHECK(kernel.L(i, i) == doctest::Approx(std::pow(q[i], 2 * gamma / alpha)).epsilon(1e-10));
  }
  CHECK((kernel.L - kernel.L.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(kernel.L).eigenvalues().minCoeff();
  CHECK(min_eig >= -1e-8 * std::max(1.0, kernel.L.diagonal().maxCoeff()));
}

TEST_CASE("kernel special cases and validation") {
  RowMatrix psis(2, 2);
  psis << 0.3, 0.3, 0.3, 0.3;
  const DppKernel dup = BuildKernel(psis, Vector::Ones(2), 1.0, 1.0, 1.0);
  CHECK(std::abs(dup.L.determinant()) < 1e-14);
  Rng rng(2);
  const RowMatrix r = testing::RandomRows(rng, 5, 2);
  Vector q(5);
  q << 0.1, 0.5, 0.9, 0.2, 0.7;
  const DppKernel flat = BuildKernel(r, q, 1.0, 0.0, 1.0);
  CHECK((flat.L - flat.similarity).norm() == 0.0);
  q[2] = -0.1;
  CHECK(CodeOf([&] { BuildKernel(r, q, 1.0, 1.0, 1.0); }) == ErrorCode::kInvalidInput);
  CHECK(CodeOf([&] { BuildKernel(r, Vector::Ones(5), 0.0, 1.0, 1.0); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("alpha ratio: a more diverse pair is 2x likelier at alpha 1, 4x at alpha 2") {
  const double sigma = 0.5;
  RowMatrix psis(3, 1);
  psis << 0.0, sigma * std::sqrt(std::log(2.0)), 100.0;
  for (double alpha : {1.0, 2.0}) {
    const DppKernel kernel = BuildKernel(psis, Vector::Ones(3), sigma, 1.0, alpha);
    // P(A) proportional to det(L_A)^alpha, normalized over all 2-subsets.
    std::map<IndexList, double> p;
    double z = 0.0;
    ForEachSubset(3, 2, [&](const IndexList& s) {
      p[s] = std::pow(DetSubset(kernel.L, s), alpha);
      z += p[s];
    });
    const double ratio = (p[IndexList{0, 2}] / z) / (p[IndexList{0, 1}] / z);
    CHECK(ratio == doctest::Approx(std::pow(2.0, alpha)).epsilon(1e-12));
  }
}

TEST_CASE("alpha does not change the greedy mode") {
  Rng rng(3);
  const RowMatrix psis = testing::RandomRows(rng, 20, 2);
  Vector q(20);
  for (int i = 0; i < 20; ++i) q[i] = 0.05 + Uniform01(rng);
  const auto a = GreedyMode(BuildKernel(psis, q, 0.4, 1.0, 1.0), 5).positions;
  const auto b = GreedyMode(BuildKernel(psis, q, 0.4, 1.0, 3.0), 5).positions;
  CHECK(a == b);
}

TEST_CASE("greedy picks follow the determinant definition") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix L = testing::RandomSpd(rng, 10);
    const GreedyModeResult got = GreedyModeOnMatrix(L, 4, Vector::Zero(10));
    IndexList chosen;
    for (int step = 0; step < 4; ++step) {
      std::size_t best = 0;
      double best_det = -1.0;
      for (std::size_t j = 0; j < 10; ++j) {
        if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
        IndexList s = chosen;
        s.push_back(j);
        const double d = DetSubset(L, s);
        if (d > best_det) best_det = d, best = j;
      }
      chosen.push_back(best);
      CHECK(got.log_dets[static_cast<std::size_t>(step)] == doctest::Approx(std::log(best_det)).epsilon(1e-9));
    }
    CHECK(got.positions == chosen);
    CHECK(got.fallback_picks == 0);
  }
}

TEST_CASE("greedy first pick is the largest diagonal and the set has volume") {
  Rng rng(5);
  const Matrix L = testing::RandomSpd(rng, 6);
  Eigen::Index arg;
  L.diagonal().maxCoeff(&arg);
  const GreedyModeResult r = GreedyModeOnMatrix(L, 3, Vector::Zero(6));
  CHECK(r.positions[0] == static_cast<std::size_t>(arg));
  CHECK(DetSubset(L, r.positions) > 0.0);
  CHECK(GreedyModeOnMatrix(L, 1, Vector::Zero(6)).positions == IndexList{static_cast<std::size_t>(arg)});
}

TEST_CASE("greedy is within e^-2 of the exhaustive mode and exact in the equal-q case") {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const RowMatrix psis = testing::RandomRows(rng, 12, 2);
    Vector q(12);
    for (int i = 0; i < 12; ++i) q[i] = 0.1 + Uniform01(rng);
    const Matrix L = BuildKernel(psis, q, 0.5, 1.0, 1.0).ModeKernel();
    for (std::size_t k : {2, 3}) {
      double mode = 0.0;
      ForEachSubset(12, k, [&](const IndexList& s) { mode = std::max(mode, DetSubset(L, s)); });
      CHECK(DetSubset(L, GreedyModeOnMatrix(L, k, q).positions) >= mode * std::exp(-2.0));
    }
  }
  // Equal quality, three tight clusters: the mode takes one from each and
  // greedy finds it.
  RowMatrix psis(6, 1);
  psis << 0.0, 0.01, 5.0, 5.01, 10.0, 10.01;
  const Matrix L = BuildKernel(psis, Vector::Ones(6), 1.0, 1.0, 1.0).L;
  double mode = 0.0;
  ForEachSubset(6, 3, [&](const IndexList& s) { mode = std::max(mode, DetSubset(L, s)); });
  CHECK(DetSubset(L, GreedyModeOnMatrix(L, 3, Vector::Ones(6)).positions) == doctest::Approx(mode).epsilon(1e-12));
}

TEST_CASE("greedy falls back to priority on a degenerate kernel") {
  const Matrix L = Matrix::Ones(4, 4);
  Vector priority(4);
  priority << 0.1, 0.4, 0.3, 0.4;
  const GreedyModeResult r = GreedyModeOnMatrix(L, 3, priority);
  CHECK(r.positions[0] == 0);
  CHECK(r.fallback_picks == 2);
  CHECK(r.positions == IndexList{0, 1, 3});
  CHECK(CodeOf([&] { GreedyModeOnMatrix(L, 5, priority); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("conditioned kernel reproduces brute-force conditional probabilities") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial % 5);  // N <= 8
    const Matrix L = testing::RandomSpd(rng, static_cast<Eigen::Index>(n));
    const IndexList chosen = trial % 2 ? IndexList{1} : IndexList{0, 2};
    const ConditionedKernel c = ConditionKernel(L, chosen);
    CHECK(c.remaining == Complement(n, chosen));
    // Unconstrained L-ensemble: P(X = A | B in X) = det(L_A) / sum_{A' >= B} det(L_A').
    double z = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      bool has_b = true;
      for (std::size_t b : chosen) has_b &= ((mask >> b) & 1) != 0;
      if (!has_b) continue;
      IndexList s;
      for (std::size_t i = 0; i < n; ++i) if ((mask >> i) & 1) s.push_back(i);
      z += DetSubset(L, s);
    }
    const double z_cond = (c.L + Matrix::Identity(c.L.rows(), c.L.cols())).determinant();
    for (std::size_t mask = 0; mask < (std::size_t{1} << c.remaining.size()); ++mask) {
      IndexList local, full = chosen;
      for (std::size_t i = 0; i < c.remaining.size(); ++i) {
        if ((mask >> i) & 1) {
          local.push_back(i);
          full.push_back(c.remaining[i]);
        }
      }
      std::sort(full.begin(), full.end());
      const double brute = DetSubset(L, full) / z;
      const double cond = DetSubset(c.L, local) / z_cond;
      CHECK(std::abs(brute - cond) <= 1e-8);
    }
  }
}

TEST_CASE("conditioning: empty set is identity and order does not matter") {
  Rng rng(8);
  const Matrix L = testing::RandomSpd(rng, 7);
  const ConditionedKernel none = ConditionKernel(L, {});
  CHECK((none.L - L).cwiseAbs().maxCoeff() <= 1e-10);
  const ConditionedKernel both = ConditionKernel(L, {2, 5});
  const ConditionedKernel first = ConditionKernel(L, {2});
  // Index 5 of the original set is position 4 after dropping 2.
  const ConditionedKernel second = ConditionKernel(first.L, {4});
  CHECK((both.L - second.L).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("conditioning on a singular block reports a numerical error") {
  Matrix L = Matrix::Ones(3, 3);
  CHECK(CodeOf([&] { ConditionKernel(L, {0, 1}); }) == ErrorCode::kNumerical);
}

TEST_CASE("generating polynomial evaluators agree") {
  Rng rng(9);
  const Matrix L = testing::RandomSpd(rng, 8);
  Vector v(8);
  for (int i = 0; i < 8; ++i) v[i] = Uniform01(rng) * 2;
  for (std::size_t k = 1; k <= 5; ++k) {
    double naive = 0.0;
    ForEachSubset(8, k, [&](const IndexList& s) {
      double t = DetSubset(L, s);
      for (std::size_t i : s) t *= v[static_cast<Eigen::Index>(i)];
      naive += t;
    });
    CHECK(GenPolyExhaustive(L, k, v) == doctest::Approx(naive).epsilon(1e-10));
    CHECK(std::abs(GenPoly(L, k, v) - naive) <= 1e-8 * std::max(1.0, naive));
  }
  CHECK(GenPoly(L, 1, v) == doctest::Approx(L.diagonal().dot(v)).epsilon(1e-12));
}

TEST_CASE("swap chain matches the exact k-DPP distribution") {
  Rng rng(10);
  const RowMatrix psis = testing::RandomRows(rng, 5, 2);
  Vector q(5);
  q << 0.9, 0.4, 0.7, 0.2, 0.6;
  const Matrix L = BuildKernel(psis, q, 0.6, 1.0, 1.0).L;
  const auto exact = ExactKDpp(L, 2);
  std::map<IndexList, double> counts;
  KDppChain chain(L, 2, 3);
  const int steps = 50000;
  for (int s = 0; s < steps; ++s) {
    chain.Step();
    IndexList st = chain.state();
    std::sort(st.begin(), st.end());
    counts[st] += 1.0 / steps;
  }
  double tv = 0.0;
  for (const auto& [s, p] : exact) tv += std::abs(p - counts[s]);
  CHECK(tv / 2 <= 0.05);
}

TEST_CASE("the surrogate y is unbiased for the inclusion indicator") {
  Rng rng(11);
  const Matrix L = testing::RandomSpd(rng, 5, 0.05);
  const auto exact = ExactKDpp(L, 2);
  Vector marginal = Vector::Zero(5);
  for (const auto& [s, p] : exact) for (std::size_t i : s) marginal[static_cast<Eigen::Index>(i)] += p;
  KDppChain chain(L, 2, 17);
  for (int i = 0; i < 1000; ++i) chain.Step();
  const int steps = 100000;
  Vector mean_y = Vector::Zero(5), mean_ind = Vector::Zero(5);
  Vector sq_y = Vector::Zero(5);
  Vector y;
  for (int s = 0; s < steps; ++s) {
    chain.Step(&y);
    CHECK_MESSAGE(std::abs(y.sum() - 2.0) < 1e-9, "y sums to k");
    mean_y += y;
    sq_y += y.cwiseProduct(y);
    for (std::size_t i : chain.state()) mean_ind[static_cast<Eigen::Index>(i)] += 1.0;
  }
  mean_y /= steps;
  mean_ind /= steps;
  sq_y /= steps;
  for (int i = 0; i < 5; ++i) {
    // Chain draws are correlated; 3 sigma on an effective sample of steps / 20.
    const double sd = std::sqrt((sq_y[i] - mean_y[i] * mean_y[i]) / (steps / 20.0));
    const double sd_ind = std::sqrt(marginal[i] * (1 - marginal[i]) / (steps / 20.0));
    CHECK(std::abs(mean_y[i] - marginal[i]) <= 3 * sd + 1e-3);
    CHECK(std::abs(mean_ind[i] - marginal[i]) <= 3 * sd_ind + 1e-3);
  }
}

TEST_CASE("sampler edge cases") {
  Rng rng(12);
  const Matrix L = testing::RandomSpd(rng, 4);
  CHECK(SampleKDpp(L, 4, 100, 1) == IndexList{0, 1, 2, 3});
  RowMatrix psis(4, 1);
  psis << 0.0, 0.0, 3.0, 6.0;
  const Matrix dup = BuildKernel(psis, Vector::Ones(4), 1.0, 1.0, 1.0).L;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const IndexList s = SampleKDpp(dup, 2, 50, seed);
    CHECK_FALSE((s[0] == 0 && s[1] == 1));
  }
  CHECK(CodeOf([&] { KDppChain(Matrix::Zero(3, 3), 2, 1); }) == ErrorCode::kDegenerateKernel);
}

TEST_CASE("mirror descent keeps v on the scaled simplex and approaches the optimum") {
  Rng rng(13);
  const Matrix L = testing::RandomSpd(rng, 8, 0.05);
  MirrorDescentConfig config;
  config.iterations = 300;
  const MirrorDescentResult r = MirrorDescent(L, 3, config, 4);
  CHECK(std::abs(r.v.sum() - 3.0) <= 1e-9);
  CHECK(r.v.minCoeff() >= 1e-12);
  const Vector opt = ExactRelaxationOptimum(L, 3);
  const double log_opt = std::log(GenPolyExhaustive(L, 3, opt));
  const double log_start = std::log(GenPolyExhaustive(L, 3, Vector::Constant(8, 3.0 / 8.0)));
  const double log_got = std::log(GenPolyExhaustive(L, 3, r.v));
  CHECK(log_got > log_start);
  CHECK(log_got >= log_opt - 0.1 * (log_opt - log_start) - 0.05);
}

TEST_CASE("mirror descent improves the running average of log g") {
  Rng rng(14);
  int improved = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const RowMatrix psis = testing::RandomRows(rng, 30, 2);
    Vector q(30);
    for (int i = 0; i < 30; ++i) q[i] = 0.05 + Uniform01(rng);
    const Matrix L = BuildKernel(psis, q, 0.4, 1.0, 1.0).L;
    MirrorDescentConfig config;
    config.iterations = 200;
    config.mcmc_steps = 50;
    config.record_objective = true;
    const MirrorDescentResult r = MirrorDescent(L, 3, config, static_cast<std::uint64_t>(trial));
    REQUIRE(r.log_g.size() == 201);
    const double avg = std::accumulate(r.log_g.begin() + 1, r.log_g.end(), 0.0) / 200.0;
    if (avg > r.log_g.front()) ++improved;
  }
  CHECK(improved >= 18);
}

TEST_CASE("maximum coordinate rounding basics") {
  Rng rng(15);
  const Matrix L = testing::RandomSpd(rng, 6);
  Eigen::Index arg;
  L.diagonal().maxCoeff(&arg);
  MirrorDescentConfig config;
  config.iterations = 50;
  config.mcmc_steps = 20;
  CHECK(MaxCoordinateRounding(L, 1, config, 1) == IndexList{static_cast<std::size_t>(arg)});
  CHECK(MaxCoordinateRounding(L, 6, config, 1).size() == 6);
  const IndexList r = MaxCoordinateRounding(L, 3, config, 1);
  CHECK(std::set<std::size_t>(r.begin(), r.end()).size() == 3);
  CHECK(MaxCoordinateRounding(L, 3, config, 1) == r);
}

TEST_CASE("maximum coordinate rounding finds the mode of a clustered kernel") {
  RowMatrix psis(9, 2);
  psis << 0, 0, 0.02, 0, 0, 0.02, 5, 0, 5.02, 0, 5, 0.02, 0, 5, 0.02, 5, 0, 5.02;
  Vector q = Vector::Ones(9);
  const Matrix L = BuildKernel(psis, q, 1.0, 1.0, 1.0).L;
  const IndexList r = MaxCoordinateRounding(L, 3, MirrorDescentConfig{}, 2);
  std::set<std::size_t> clusters;
  for (std::size_t i : r) clusters.insert(i / 3);
  CHECK(clusters.size() == 3);
}

TEST_CASE("dpp batch: both algorithms return k distinct reduced queries") {
  Rng rng(16);
  ScoredQuerySet reduced;
  reduced.psis = testing::RandomRows(rng, 40, 4);
  reduced.scores.resize(40);
  for (int i = 0; i < 40; ++i) reduced.scores[i] = Uniform01(rng);
  for (std::size_t i = 0; i < 40; ++i) reduced.indices.push_back(500 + i);
  DppBatchOptions options;
  options.mirror.iterations = 30;
  options.mirror.mcmc_steps = 20;
  for (auto algorithm : {ModeAlgorithm::kGreedy, ModeAlgorithm::kMaxCoordinateRounding}) {
    options.algorithm = algorithm;
    const Batch b = DppBatch(reduced, 6, options);
    CHECK(b.indices.size() == 6);
    CHECK(std::set<std::size_t>(b.indices.begin(), b.indices.end()).size() == 6);
    CHECK(std::is_sorted(b.indices.begin(), b.indices.end()));
    CHECK(b.method == BatchMethod::kDppMode);
    CHECK(DppBatch(reduced, 6, options).indices == b.indices);
  }
  // k = 1 reduces to the single most informative query.
  Eigen::Index best;
  reduced.scores.maxCoeff(&best);
  options.algorithm = ModeAlgorithm::kGreedy;
  CHECK(DppBatch(reduced, 1, options).indices == IndexList{500 + static_cast<std::size_t>(best)});
}

TEST_CASE("log det of a subset") {
  Rng rng(17);
  const Matrix L = testing::RandomSpd(rng, 5);
  CHECK(LogDetSubset(L, {1, 3}) == doctest::Approx(std::log(DetSubset(L, {1, 3}))).epsilon(1e-12));
  CHECK(LogDetSubset(L, {}) == 0.0);
}

}  // TEST_SUITE

}  // namespace
}  // namespace batchpref
