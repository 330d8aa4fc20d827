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
#include <cmath>
#include <numeric>
#include <vector>

#include "bench/bench.hpp"

namespace batchpref {
namespace {

struct SignedRanks {
  double w_plus = 0.0;
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
  bool has_ties = false;
  std::size_t n = 0;
};

SignedRanks Rank(std::span<const double> differences) {
  std::vector<std::size_t> order(differences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(differences[a]) < std::abs(differences[b]);
  });
  SignedRanks out;
  out.n = differences.size();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           std::abs(differences[order[j + 1]]) == std::abs(differences[order[i]])) {
      ++j;
    }
    const double t = static_cast<double>(j - i + 1);
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    if (t > 1.0) {
      out.has_ties = true;
      out.tie_term += t * t * t - t;
    }
    for (std::size_t r = i; r <= j; ++r) {
      if (differences[order[r]] > 0.0) out.w_plus += rank;
    }
    i = j + 1;
  }
  return out;
}

void RequireNonZero(std::span<const double> differences) {
  for (double d : differences) {
    Require(std::isfinite(d) && d != 0.0, ErrorCode::kInvalidInput,
            "differences must be finite and non-zero");
  }
}

}  // namespace

double WilcoxonExactP(std::span<const double> differences) {
  RequireNonZero(differences);
  const SignedRanks ranks = Rank(differences);
  Require(!ranks.has_ties, ErrorCode::kInvalidInput, "exact distribution requires untied differences");
  const std::size_t n = ranks.n;
  if (n == 0) return 1.0;
  const std::size_t max_sum = n * (n + 1) / 2;
  // counts[s] = number of sign patterns with W+ = s, scaled by 2^-n on the fly.
  std::vector<double> counts(max_sum + 1, 0.0);
  counts[0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    for (std::size_t s = max_sum; s >= r; --s) counts[s] = 0.5 * (counts[s] + counts[s - r]);
    for (std::size_t s = std::min(r, max_sum + 1); s-- > 0;) counts[s] *= 0.5;
  }
  const auto w = static_cast<std::size_t>(std::llround(ranks.w_plus));
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    if (s <= w) lower += counts[s];
    if (s >= w) upper += counts[s];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

double WilcoxonNormalP(std::span<const double> differences) {
  RequireNonZero(differences);
  const SignedRanks ranks = Rank(differences);
  const double n = static_cast<double>(ranks.n);
  if (ranks.n == 0) return 1.0;
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ranks.tie_term / 48.0;
  if (!(var > 0.0)) return 1.0;
  const double z = (ranks.w_plus - mean) / std::sqrt(var);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

double WilcoxonSignedRank(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), ErrorCode::kInvalidInput, "paired samples must have equal length");
  Require(a.size() >= 10, ErrorCode::kInsufficientData, "Wilcoxon test needs at least 10 pairs");
  std::vector<double> differences;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    Require(std::isfinite(d), ErrorCode::kInvalidInput, "paired samples must be finite");
    if (d != 0.0) differences.push_back(d);
  }
  if (differences.empty()) return 1.0;
  if (differences.size() <= kWilcoxonExactLimit && !Rank(differences).has_ties) {
    return WilcoxonExactP(differences);
  }
  return WilcoxonNormalP(differences);
}

}  // namespace batchpref
