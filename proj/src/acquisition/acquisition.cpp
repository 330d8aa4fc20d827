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
#include "acquisition/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace batchpref {
namespace {

constexpr double kInvLn2 = 1.4426950408889634;
constexpr Eigen::Index kChunk = 32;

// Binary entropy (nats) of p = sigmoid(x), written in terms of a = |x| so it is
// accurate at both tails: log(1 + e^-a) + a e^-a / (1 + e^-a).
template <typename Derived>
auto SigmoidEntropy(const Eigen::ArrayBase<Derived>& x) {
  const auto a = x.abs().min(kExpClamp);
  const auto e = (-a).exp();
  return (e.log1p() + a * e / (1.0 + e)).eval();
}

double BinaryEntropyBits(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h * kInvLn2;
}

double FinishMI(double mean_p, double mean_h_nats) {
  const double mi = BinaryEntropyBits(mean_p) - mean_h_nats * kInvLn2;
  return std::clamp(mi, 0.0, 1.0);
}

}  // namespace

double MutualInformation(const Vector& psi, const RowMatrix& samples) {
  Require(samples.rows() >= 1, ErrorCode::kInvalidInput, "need at least one posterior sample");
  Require(psi.size() == samples.cols(), ErrorCode::kInvalidInput, "psi / sample dimension mismatch");
  const Eigen::ArrayXd x = (samples * psi).array().max(-kExpClamp).min(kExpClamp);
  const Eigen::ArrayXd p = 1.0 / (1.0 + (-x).exp());
  const double m = static_cast<double>(samples.rows());
  return FinishMI(p.sum() / m, SigmoidEntropy(x).sum() / m);
}

Vector MutualInformationBatch(const RowMatrix& psis, const RowMatrix& samples) {
  Require(samples.rows() >= 1, ErrorCode::kInvalidInput, "need at least one posterior sample");
  Require(psis.cols() == samples.cols(), ErrorCode::kInvalidInput, "psi / sample dimension mismatch");
  namespace ei = Eigen::internal;
  using Packet = ei::packet_traits<double>::type;
  constexpr Eigen::Index kWidth = ei::packet_traits<double>::size;

  const Eigen::Index n = psis.rows();
  const Eigen::Index m = samples.rows();
  Vector out(n);
  const Matrix samples_t = samples.transpose();
  RowMatrix x;
  const Packet one = ei::pset1<Packet>(1.0);
  const Packet zero = ei::pset1<Packet>(0.0);
  const Packet clamp = ei::pset1<Packet>(kExpClamp);
  for (Eigen::Index start = 0; start < n; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, n - start);
    x.noalias() = psis.middleRows(start, len) * samples_t;  // len x M
    for (Eigen::Index i = 0; i < len; ++i) {
      // Single fused pass, one exp and one log per entry. With a = |x| and
      // e = exp(-a): p = 1/(1+e) for x >= 0, e/(1+e) otherwise, and
      // H(p) = log(1+e) + a e/(1+e). log(1 + e) rather than log1p is exact to
      // an ulp here because e is in (0, 1].
      const double* row = x.row(i).data();
      Packet p_acc = zero;
      Packet h_acc = zero;
      Eigen::Index j = 0;
      for (; j + kWidth <= m; j += kWidth) {
        const Packet v = ei::ploadu<Packet>(row + j);
        const Packet a = ei::pmin(ei::pabs(v), clamp);
        const Packet e = ei::pexp(ei::pnegate(a));
        const Packet d = ei::padd(one, e);
        const Packet r = ei::pdiv(one, d);
        p_acc = ei::padd(p_acc, ei::pmul(ei::pselect(ei::pcmp_le(zero, v), one, e), r));
        h_acc = ei::padd(h_acc, ei::padd(ei::plog(d), ei::pmul(ei::pmul(a, e), r)));
      }
      double p_sum = ei::predux(p_acc);
      double h_sum = ei::predux(h_acc);
      for (; j < m; ++j) {
        const double a = std::min(std::abs(row[j]), kExpClamp);
        const double e = std::exp(-a);
        const double d = 1.0 + e;
        p_sum += (row[j] >= 0.0 ? 1.0 : e) / d;
        h_sum += std::log(d) + a * e / d;
      }
      const double md = static_cast<double>(m);
      out[start + i] = FinishMI(p_sum / md, h_sum / md);
    }
  }
  return out;
}

ScoredQuerySet ReduceByScores(const RowMatrix& psis, const Vector& scores, std::size_t n) {
  const auto k = static_cast<std::size_t>(psis.rows());
  Require(n <= k, ErrorCode::kInvalidInput, "reduced size N exceeds dataset size K");
  Require(n >= 1, ErrorCode::kInvalidInput, "reduced size N must be >= 1");
  IndexList order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto better = [&](std::size_t a, std::size_t b) {
    const double sa = scores[static_cast<Eigen::Index>(a)];
    const double sb = scores[static_cast<Eigen::Index>(b)];
    return sa > sb || (sa == sb && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), better);
  order.resize(n);

  ScoredQuerySet out;
  out.indices = order;
  out.psis.resize(static_cast<Eigen::Index>(n), psis.cols());
  out.scores.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = static_cast<Eigen::Index>(order[i]);
    out.psis.row(static_cast<Eigen::Index>(i)) = psis.row(src);
    out.scores[static_cast<Eigen::Index>(i)] = scores[src];
  }
  return out;
}

ScoredQuerySet ReduceDataset(const QueryDataset& dataset, const RowMatrix& samples, std::size_t n) {
  Require(n <= dataset.size(), ErrorCode::kInvalidInput, "reduced size N exceeds dataset size K");
  const Vector scores = MutualInformationBatch(dataset.psi, samples);
  return ReduceByScores(dataset.psi, scores, n);
}

JointMIEvaluator::JointMIEvaluator(const RowMatrix& psis, const RowMatrix& samples) {
  Require(samples.rows() >= 1, ErrorCode::kInvalidInput, "need at least one posterior sample");
  Require(psis.cols() == samples.cols(), ErrorCode::kInvalidInput, "psi / sample dimension mismatch");
  const RowMatrix x = (psis * samples.transpose()).array().max(-kExpClamp).min(kExpClamp).matrix();
  p_plus_ = (1.0 / (1.0 + (-x.array()).exp())).matrix();
  conditional_entropy_.resize(psis.rows());
  for (Eigen::Index i = 0; i < psis.rows(); ++i) {
    conditional_entropy_[i] = SigmoidEntropy(x.row(i).array()).mean() * kInvLn2;
  }
}

void JointMIEvaluator::Recurse(std::span<const std::size_t> batch, std::size_t depth,
                               const double* weights, std::vector<double>& scratch,
                               double& entropy) const {
  const Eigen::Index m = p_plus_.cols();
  if (depth == batch.size()) {
    double mean = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) mean += weights[j];
    mean /= static_cast<double>(m);
    if (mean > 0.0) entropy -= mean * std::log2(mean);
    return;
  }
  const double* p = p_plus_.row(static_cast<Eigen::Index>(batch[depth])).data();
  double* next = scratch.data() + static_cast<std::size_t>(m) * depth;
  for (Eigen::Index j = 0; j < m; ++j) next[j] = weights[j] * p[j];
  Recurse(batch, depth + 1, next, scratch, entropy);
  for (Eigen::Index j = 0; j < m; ++j) next[j] = weights[j] * (1.0 - p[j]);
  Recurse(batch, depth + 1, next, scratch, entropy);
}

double JointMIEvaluator::Evaluate(std::span<const std::size_t> batch) const {
  Require(batch.size() <= kMaxJointBatch, ErrorCode::kInvalidInput,
          "joint batch MI refuses k > 20 (2^k response patterns)");
  if (batch.empty()) return 0.0;
  for (std::size_t i : batch) {
    Require(i < candidates(), ErrorCode::kInvalidInput, "batch index out of range");
  }
  const auto m = static_cast<std::size_t>(p_plus_.cols());
  std::vector<double> scratch(m * batch.size());
  const std::vector<double> ones(m, 1.0);
  double response_entropy = 0.0;
  Recurse(batch, 0, ones.data(), scratch, response_entropy);
  double conditional = 0.0;
  for (std::size_t i : batch) conditional += conditional_entropy_[static_cast<Eigen::Index>(i)];
  return std::max(0.0, response_entropy - conditional);
}

double JointBatchMI(std::span<const std::size_t> batch, const RowMatrix& psis,
                    const RowMatrix& samples) {
  Require(batch.size() <= kMaxJointBatch, ErrorCode::kInvalidInput,
          "joint batch MI refuses k > 20 (2^k response patterns)");
  RowMatrix selected(static_cast<Eigen::Index>(batch.size()), psis.cols());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Require(batch[i] < static_cast<std::size_t>(psis.rows()), ErrorCode::kInvalidInput,
            "batch index out of range");
    selected.row(static_cast<Eigen::Index>(i)) = psis.row(static_cast<Eigen::Index>(batch[i]));
  }
  JointMIEvaluator eval(selected, samples);
  IndexList local(batch.size());
  std::iota(local.begin(), local.end(), std::size_t{0});
  return eval.Evaluate(local);
}

}  // namespace batchpref
