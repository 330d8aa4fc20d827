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
#include <limits>
#include <numeric>

#include "batchgen/batchgen.hpp"
#include "core/rng.hpp"

namespace batchpref {
namespace {

constexpr int kMaxRounds = 100;

Matrix PairwiseDistances(const RowMatrix& points) {
  const Eigen::Index n = points.rows();
  Matrix dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = (points.row(i) - points.row(j)).norm();
    }
  }
  return dist;
}

// k-means++ seeding: first medoid uniform, then proportional to squared
// distance from the nearest chosen medoid.
IndexList Seed(const Matrix& dist, std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(dist.rows());
  IndexList medoids;
  medoids.push_back(UniformIndex(rng, n));
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = dist(i, medoids[0]);
  while (medoids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += nearest[i] * nearest[i];
    std::size_t pick = n;
    if (total > 0.0) {
      double r = Uniform01(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = nearest[i] * nearest[i];
        if (w <= 0.0) continue;
        if (r < w) {
          pick = i;
          break;
        }
        r -= w;
      }
      if (pick == n) {
        // Floating-point leftover: take the last point with positive weight.
        for (std::size_t i = n; i-- > 0;) {
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All remaining points coincide with a medoid; take the first unused.
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(medoids.begin(), medoids.end(), i) == medoids.end()) {
          pick = i;
          break;
        }
      }
    }
    medoids.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist(i, pick));
  }
  return medoids;
}

std::vector<std::size_t> Assign(const Matrix& dist, const IndexList& medoids) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      if (i == medoids[c]) {
        label[i] = c;
        break;
      }
      const double dd = dist(i, medoids[c]);
      if (dd < best) {
        best = dd;
        label[i] = c;
      }
    }
  }
  return label;
}

}  // namespace

IndexList KMedoids(const RowMatrix& points, std::size_t k, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  Require(k >= 1, ErrorCode::kInvalidInput, "k must be >= 1");
  Require(k <= n, ErrorCode::kInvalidInput, "k exceeds the number of points");
  if (k == n) {
    IndexList all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  const Matrix dist = PairwiseDistances(points);
  Rng rng(seed);
  IndexList medoids = Seed(dist, k, rng);

  for (int round = 0; round < kMaxRounds; ++round) {
    const auto label = Assign(dist, medoids);
    bool changed = false;
    for (std::size_t c = 0; c < k; ++c) {
      // Member minimizing the summed distance to its cluster; ties keep the
      // current medoid, then the lower index.
      double best_cost = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (label[j] == c) best_cost += dist(medoids[c], j);
      }
      std::size_t best = medoids[c];
      for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != c || i == medoids[c]) continue;
        double cost = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (label[j] == c) cost += dist(i, j);
        }
        if (cost < best_cost - 1e-12) {
          best_cost = cost;
          best = i;
        }
      }
      if (best != medoids[c]) {
        medoids[c] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::sort(medoids.begin(), medoids.end());
  return medoids;
}

Batch MedoidsBatch(const ScoredQuerySet& reduced, std::size_t k, std::uint64_t seed) {
  Require(k <= reduced.size(), ErrorCode::kInvalidInput, "batch size k exceeds reduced size N");
  return MakeBatch(reduced, KMedoids(reduced.psis, k, seed), BatchMethod::kMedoids);
}

}  // namespace batchpref
