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

#ifndef BATCHPREF_BENCH_BENCH_HPP_
#define BATCHPREF_BENCH_BENCH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "batchgen/batchgen.hpp"
#include "belief/belief.hpp"
#include "core/rng.hpp"
#include "dpp/dpp.hpp"

namespace batchpref {

enum class NoiseModel { kNoiseless, kSoftmax };

NoiseModel ParseNoiseModel(const std::string& name);
const char* NoiseModelName(NoiseModel model);

class SimulatedUser {
 public:
  // w_true is normalized to unit length; throws kInvalidInput when it is zero.
  SimulatedUser(Vector w_true, NoiseModel noise, std::uint64_t seed);

  // Noiseless: sign(w.psi) with an exact zero answered +1. Softmax: +1 with
  // probability 1 / (1 + exp(-w.psi)).
  int Respond(const Vector& psi);

  const Vector& w_true() const { return w_true_; }
  NoiseModel noise() const { return noise_; }

 private:
  Vector w_true_;
  NoiseModel noise_;
  Rng rng_;
};

Vector RandomUnitVector(std::size_t dim, Rng& rng);

// Cosine of the angle between the two vectors; throws kInvalidInput when
// either is zero.
double Alignment(const Vector& w_true, const Vector& w_hat);

// Mean over the holdout of log (1/M) sum_m P(I | w_m, psi).
double HoldoutLoglik(const RowMatrix& samples, const RowMatrix& psis, std::span<const int> choices);

struct Checkpoint {
  std::size_t queries = 0;
  double alignment = 0.0;
  double loglik = 0.0;
  double wallclock_seconds = 0.0;
};

struct LearningCurve {
  std::string method;
  std::uint64_t seed = 0;
  std::vector<Checkpoint> points;
  std::vector<double> generation_seconds;  // per batch
  std::vector<std::size_t> batch_sizes;
  bool failed = false;
  std::string error;
};

enum class CurveMetric { kAlignment, kLoglik };

// Trapezoidal area under the metric over queries answered; needs >= 2 points.
double Auc(const LearningCurve& curve, CurveMetric metric);

// Two-sided p-value of the Wilcoxon signed-rank test on paired samples.
// Zero differences are dropped; with none left the p-value is 1. Without ties
// and with at most kWilcoxonExactLimit non-zero differences the exact null
// distribution is used, otherwise the normal approximation with tie
// correction. Throws kInsufficientData for fewer than 10 pairs.
inline constexpr std::size_t kWilcoxonExactLimit = 50;
double WilcoxonSignedRank(std::span<const double> a, std::span<const double> b);
// Exact two-sided p for a given set of non-zero, untied differences.
double WilcoxonExactP(std::span<const double> differences);
// Normal approximation (tie corrected, no continuity correction).
double WilcoxonNormalP(std::span<const double> differences);

enum class MethodKind {
  kSequential,
  kGreedy,
  kMedoids,
  kBoundaryMedoids,
  kSuccessiveElimination,
  kAnnealing,
  kDpp,
  kDppMcr,
};

// Names: sequential, greedy, medoids, boundary_medoids,
// successive_elimination, annealing, dpp, dpp_mcr. Throws kInvalidInput.
MethodKind ParseMethod(const std::string& name);
const char* MethodName(MethodKind kind);

struct SelectionOptions {
  AnnealingBudget annealing;
  MirrorDescentConfig mirror;
  std::uint64_t seed = 0;
};

// Reduces the dataset to the N most informative queries under the samples
// and picks k of them with the method. The sequential method picks the single
// most informative query of the whole dataset (k = N = 1).
IndexList SelectQueries(MethodKind kind, const QueryDataset& dataset, const RowMatrix& samples,
                        std::size_t k, std::size_t n, const SelectionOptions& options);

// Picks k queries of an already reduced set; not valid for the sequential method.
IndexList SelectFromReduced(MethodKind kind, const ScoredQuerySet& reduced, const RowMatrix& samples,
                            std::size_t k, const SelectionOptions& options);

struct ExperimentConfig {
  std::string env_id = "driver";
  std::vector<std::string> methods{"greedy", "dpp"};
  std::size_t k = 10;
  std::size_t n = 200;
  std::size_t m = 1000;
  std::size_t batches = 6;
  std::size_t seeds = 30;
  std::size_t dataset_size = 100000;
  std::size_t holdout_size = 1000;
  std::uint64_t base_seed = 0;
  std::uint64_t dataset_seed = 0;
  std::string dataset_path;  // load instead of generating when set
  NoiseModel noise = NoiseModel::kNoiseless;
  std::size_t workers = 1;
  std::string output_dir;  // no files written when empty
  // Annealing evaluation budget; 0 calibrates it once per experiment from
  // the slowest other batch method's selection time.
  std::size_t annealing_evaluations = 0;
  double annealing_max_seconds = 60.0;
  MirrorDescentConfig mirror;
  // When false, wall-clock columns are written as 0 so output files depend
  // only on the configuration.
  bool record_timing = true;

  // Throws kConfiguration on violated constraints (k <= N <= K, batches >= 1, ...).
  void Validate() const;
};

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
nlohmann::json ExperimentConfigToJson(const ExperimentConfig& config);
ExperimentConfig LoadExperimentConfig(const std::string& path);

struct MethodTiming {
  std::string method;
  double per_batch_seconds = 0.0;
  double per_query_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<LearningCurve> curves;  // method-major, then seed
  std::size_t annealing_evaluations = 0;
  nlohmann::json summary;
};

// Runs every (method, seed) arm. When dataset is null it is loaded or
// generated from the config. Writes per-arm CSVs, curves.csv and summary.json
// under output_dir when it is set.
ExperimentResult RunExperiment(const ExperimentConfig& config, const QueryDataset* dataset = nullptr);

// Runs one arm. Exposed for tests.
LearningCurve RunArm(const ExperimentConfig& config, MethodKind method, std::uint64_t seed_index,
                     const QueryDataset& dataset, std::size_t annealing_evaluations);

std::string CurveCsvHeader();
std::string CurveCsvRows(const LearningCurve& curve, bool record_timing);
nlohmann::json SummarizeCurves(const ExperimentConfig& config, const std::vector<LearningCurve>& curves);

// Writes via a temporary file and rename.
void WriteFileAtomic(const std::string& path, const std::string& contents);

}  // namespace batchpref

#endif  // BATCHPREF_BENCH_BENCH_HPP_
