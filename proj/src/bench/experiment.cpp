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
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "bench/bench.hpp"
#include "envs/dataset.hpp"

namespace batchpref {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Stream tags for DeriveSeed.
enum SeedTag : std::uint64_t {
  kTagWeights = 1,
  kTagHoldoutQueries = 2,
  kTagHoldoutAnswers = 3,
  kTagArmAnswers = 4,
  kTagBelief = 5,
  kTagSelection = 6,
  kTagCalibration = 7,
};

template <typename T>
T Get(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    Fail(ErrorCode::kConfiguration, std::string("config field '") + key + "' has the wrong type");
  }
}

// Number of joint-MI evaluations annealing can afford in the selection time
// of the slowest other batch method, measured on the prior.
std::size_t CalibrateAnnealing(const ExperimentConfig& config, const QueryDataset& dataset) {
  BeliefState belief(dataset.feature_dim, DeriveSeed(config.base_seed, {kTagCalibration}),
                     AdaptiveMetropolisConfig::ForSampleCount(static_cast<int>(config.m)));
  belief.Resample();
  const RowMatrix& samples = belief.samples();
  const ScoredQuerySet reduced = ReduceDataset(dataset, samples, config.n);
  SelectionOptions options;
  options.mirror = config.mirror;
  options.seed = DeriveSeed(config.base_seed, {kTagCalibration, 1});
  constexpr int kRepeats = 3;
  double slowest = 0.0;
  for (MethodKind kind : {MethodKind::kMedoids, MethodKind::kBoundaryMedoids,
                          MethodKind::kSuccessiveElimination, MethodKind::kDpp}) {
    const auto start = Clock::now();
    for (int r = 0; r < kRepeats; ++r) SelectFromReduced(kind, reduced, samples, config.k, options);
    slowest = std::max(slowest, SecondsSince(start) / kRepeats);
  }
  auto start = Clock::now();
  const JointMIEvaluator evaluator(reduced.psis, samples);
  const double setup = SecondsSince(start);
  constexpr int kProbe = 20;
  IndexList batch(config.k);
  Rng rng(options.seed);
  double sink = 0.0;
  start = Clock::now();
  for (int r = 0; r < kProbe; ++r) {
    for (std::size_t i = 0; i < config.k; ++i) batch[i] = (UniformIndex(rng, config.n - config.k) + i * 7919) % config.n;
    std::sort(batch.begin(), batch.end());
    batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
    sink += evaluator.Evaluate(batch);
  }
  const double per_eval = std::max(SecondsSince(start) / kProbe, 1e-9);
  (void)sink;
  return static_cast<std::size_t>(std::max(1.0, (slowest - setup) / per_eval));
}

std::string FormatDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

void ExperimentConfig::Validate() const {
  auto check = [](bool ok, const std::string& msg) { Require(ok, ErrorCode::kConfiguration, msg); };
  check(!env_id.empty(), "env must be set");
  check(!methods.empty(), "at least one method is required");
  std::set<std::string> seen;
  for (const std::string& m : methods) {
    try {
      ParseMethod(m);
    } catch (const Error& e) {
      Fail(ErrorCode::kConfiguration, e.what());
    }
    check(seen.insert(m).second, "method '" + m + "' listed twice");
  }
  check(k >= 1, "k must be >= 1");
  check(k <= n, "k must not exceed N");
  check(n <= dataset_size, "N must not exceed K");
  check(m >= 1, "M must be >= 1");
  check(seeds >= 1, "seeds must be >= 1");
  check(holdout_size >= 1, "holdout_size must be >= 1");
  check(workers >= 1, "workers must be >= 1");
  check(annealing_max_seconds > 0.0, "annealing_max_seconds must be positive");
  check(mirror.iterations >= 1 && mirror.mcmc_steps >= 1 && mirror.step_size > 0.0,
        "mirror descent settings must be positive");
  if (seen.count("annealing") > 0) check(k <= kMaxJointBatch, "annealing needs k <= 20");
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j) {
  Require(j.is_object(), ErrorCode::kConfiguration, "config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "env", "methods", "k", "N", "M", "batches", "seeds", "K", "holdout_size", "base_seed",
      "dataset_seed", "dataset_path", "noise", "workers", "output_dir", "annealing_evaluations",
      "annealing_max_seconds", "mirror_descent", "record_timing"};
  for (const auto& [key, value] : j.items()) {
    Require(kKeys.count(key) > 0, ErrorCode::kConfiguration, "unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  c.env_id = Get<std::string>(j, "env", c.env_id);
  c.methods = Get<std::vector<std::string>>(j, "methods", c.methods);
  c.k = Get<std::size_t>(j, "k", c.k);
  c.n = Get<std::size_t>(j, "N", c.n);
  c.m = Get<std::size_t>(j, "M", c.m);
  c.batches = Get<std::size_t>(j, "batches", c.batches);
  c.seeds = Get<std::size_t>(j, "seeds", c.seeds);
  c.dataset_size = Get<std::size_t>(j, "K", c.dataset_size);
  c.holdout_size = Get<std::size_t>(j, "holdout_size", c.holdout_size);
  c.base_seed = Get<std::uint64_t>(j, "base_seed", c.base_seed);
  c.dataset_seed = Get<std::uint64_t>(j, "dataset_seed", c.dataset_seed);
  c.dataset_path = Get<std::string>(j, "dataset_path", c.dataset_path);
  const std::string noise = Get<std::string>(j, "noise", NoiseModelName(c.noise));
  try {
    c.noise = ParseNoiseModel(noise);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfiguration, e.what());
  }
  c.workers = Get<std::size_t>(j, "workers", c.workers);
  c.output_dir = Get<std::string>(j, "output_dir", c.output_dir);
  c.annealing_evaluations = Get<std::size_t>(j, "annealing_evaluations", c.annealing_evaluations);
  c.annealing_max_seconds = Get<double>(j, "annealing_max_seconds", c.annealing_max_seconds);
  c.record_timing = Get<bool>(j, "record_timing", c.record_timing);
  if (auto it = j.find("mirror_descent"); it != j.end()) {
    Require(it->is_object(), ErrorCode::kConfiguration, "mirror_descent must be an object");
    c.mirror.iterations = Get<std::size_t>(*it, "iterations", c.mirror.iterations);
    c.mirror.step_size = Get<double>(*it, "step_size", c.mirror.step_size);
    c.mirror.mcmc_steps = Get<std::size_t>(*it, "mcmc_steps", c.mirror.mcmc_steps);
  }
  c.Validate();
  return c;
}

nlohmann::json ExperimentConfigToJson(const ExperimentConfig& c) {
  return {{"env", c.env_id},
          {"methods", c.methods},
          {"k", c.k},
          {"N", c.n},
          {"M", c.m},
          {"batches", c.batches},
          {"seeds", c.seeds},
          {"K", c.dataset_size},
          {"holdout_size", c.holdout_size},
          {"base_seed", c.base_seed},
          {"dataset_seed", c.dataset_seed},
          {"dataset_path", c.dataset_path},
          {"noise", NoiseModelName(c.noise)},
          {"workers", c.workers},
          {"output_dir", c.output_dir},
          {"annealing_evaluations", c.annealing_evaluations},
          {"annealing_max_seconds", c.annealing_max_seconds},
          {"mirror_descent",
           {{"iterations", c.mirror.iterations},
            {"step_size", c.mirror.step_size},
            {"mcmc_steps", c.mirror.mcmc_steps}}},
          {"record_timing", c.record_timing}};
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfiguration, std::string("config is not valid JSON: ") + e.what());
  }
  return ExperimentConfigFromJson(j);
}

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require(out.good(), ErrorCode::kIo, "cannot write '" + tmp + "'");
    out << contents;
    out.flush();
    Require(out.good(), ErrorCode::kIo, "write failed for '" + tmp + "'");
  }
  fs::rename(tmp, target, ec);
  Require(!ec, ErrorCode::kIo, "cannot move '" + tmp + "' into place: " + ec.message());
}

LearningCurve RunArm(const ExperimentConfig& config, MethodKind method, std::uint64_t seed_index,
                     const QueryDataset& dataset, std::size_t annealing_evaluations) {
  LearningCurve curve;
  curve.method = MethodName(method);
  curve.seed = seed_index;
  try {
    const std::uint64_t base = config.base_seed;
    const std::size_t d = dataset.feature_dim;
    Rng weight_rng(DeriveSeed(base, {kTagWeights, seed_index}));
    const Vector w_true = RandomUnitVector(d, weight_rng);

    const auto env = MakeEnvironment(dataset.env_id);
    const RowMatrix holdout =
        GenerateQueriesWithStats(*env, config.holdout_size, DeriveSeed(base, {kTagHoldoutQueries, seed_index}),
                                 dataset.feature_stats)
            .psi;
    SimulatedUser holdout_user(w_true, config.noise, DeriveSeed(base, {kTagHoldoutAnswers, seed_index}));
    std::vector<int> holdout_choices(static_cast<std::size_t>(holdout.rows()));
    for (Eigen::Index h = 0; h < holdout.rows(); ++h) {
      holdout_choices[static_cast<std::size_t>(h)] = holdout_user.Respond(holdout.row(h).transpose());
    }

    SimulatedUser user(w_true, config.noise,
                       DeriveSeed(base, {kTagArmAnswers, seed_index, static_cast<std::uint64_t>(method)}));
    BeliefState belief(d, 0, AdaptiveMetropolisConfig::ForSampleCount(static_cast<int>(config.m)));

    const bool sequential = method == MethodKind::kSequential;
    const std::size_t k = sequential ? 1 : config.k;
    const std::size_t rounds = sequential ? config.batches * config.k : config.batches;

    SelectionOptions options;
    options.mirror = config.mirror;
    options.annealing.seconds = config.annealing_max_seconds;
    options.annealing.max_evaluations = annealing_evaluations;

    const auto arm_start = Clock::now();
    // Belief streams do not depend on the method, so every method starts from
    // the same prior samples.
    auto resample = [&](std::size_t round) {
      belief.set_seed(DeriveSeed(base, {kTagBelief, seed_index, round}));
      const auto start = Clock::now();
      belief.Resample();
      return SecondsSince(start);
    };
    auto checkpoint = [&](std::size_t answered) {
      Checkpoint c;
      c.queries = answered;
      c.alignment = Alignment(w_true, MeanWeight(belief));
      c.loglik = HoldoutLoglik(belief.samples(), holdout, holdout_choices);
      c.wallclock_seconds = config.record_timing ? SecondsSince(arm_start) : 0.0;
      curve.points.push_back(c);
    };

    double resample_seconds = resample(0);
    checkpoint(0);
    std::size_t answered = 0;
    for (std::size_t round = 0; round < rounds; ++round) {
      options.seed = DeriveSeed(base, {kTagSelection, seed_index, round});
      const auto start = Clock::now();
      const IndexList chosen = SelectQueries(method, dataset, belief.samples(), k, config.n, options);
      const double seconds = resample_seconds + SecondsSince(start);
      curve.generation_seconds.push_back(config.record_timing ? seconds : 0.0);
      curve.batch_sizes.push_back(chosen.size());
      for (std::size_t index : chosen) {
        const Vector psi = dataset.psi_row(index);
        PreferenceResponse response;
        response.query_index = index;
        response.choice = user.Respond(psi);
        belief.AddResponse(response, psi);
      }
      answered += chosen.size();
      resample_seconds = resample(round + 1);
      checkpoint(answered);
    }
  } catch (const std::exception& e) {
    curve.failed = true;
    curve.error = e.what();
  }
  return curve;
}

std::string CurveCsvHeader() { return "method,seed,queries,alignment,loglik,wallclock_s\n"; }

std::string CurveCsvRows(const LearningCurve& curve, bool record_timing) {
  std::string out;
  for (const Checkpoint& c : curve.points) {
    out += curve.method + "," + std::to_string(curve.seed) + "," + std::to_string(c.queries) + "," +
           FormatDouble(c.alignment) + "," + FormatDouble(c.loglik) + "," +
           FormatDouble(record_timing ? c.wallclock_seconds : 0.0) + "\n";
  }
  return out;
}

nlohmann::json SummarizeCurves(const ExperimentConfig& config, const std::vector<LearningCurve>& curves) {
  nlohmann::json summary;
  summary["config"] = ExperimentConfigToJson(config);
  nlohmann::json methods = nlohmann::json::object();
  nlohmann::json failures = nlohmann::json::array();
  nlohmann::json timing_query = nlohmann::json::object();
  nlohmann::json timing_batch = nlohmann::json::object();

  // auc[method][seed] for successful arms.
  std::map<std::string, std::map<std::uint64_t, double>> auc;
  for (const std::string& name : config.methods) {
    std::vector<const LearningCurve*> ok;
    std::size_t failed = 0;
    for (const LearningCurve& c : curves) {
      if (c.method != name) continue;
      if (c.failed) {
        ++failed;
        failures.push_back({{"method", c.method}, {"seed", c.seed}, {"error", c.error}});
      } else {
        ok.push_back(&c);
      }
    }
    nlohmann::json m;
    m["arms"] = ok.size() + failed;
    m["failed"] = failed;
    double auc_align = 0.0, auc_ll = 0.0, final_align = 0.0, final_ll = 0.0;
    double batch_seconds = 0.0, query_seconds = 0.0;
    std::size_t batch_count = 0;
    std::size_t auc_count = 0;
    std::vector<double> align_by_cp, ll_by_cp;
    std::vector<std::size_t> queries;
    for (const LearningCurve* c : ok) {
      if (c->points.size() >= 2) {
        const double a = Auc(*c, CurveMetric::kAlignment);
        auc[name][c->seed] = a;
        auc_align += a;
        auc_ll += Auc(*c, CurveMetric::kLoglik);
        ++auc_count;
      }
      final_align += c->points.back().alignment;
      final_ll += c->points.back().loglik;
      if (align_by_cp.size() < c->points.size()) {
        align_by_cp.resize(c->points.size(), 0.0);
        ll_by_cp.resize(c->points.size(), 0.0);
        queries.resize(c->points.size(), 0);
      }
      for (std::size_t i = 0; i < c->points.size(); ++i) {
        align_by_cp[i] += c->points[i].alignment;
        ll_by_cp[i] += c->points[i].loglik;
        queries[i] = c->points[i].queries;
      }
      for (std::size_t b = 0; b < c->generation_seconds.size(); ++b) {
        batch_seconds += c->generation_seconds[b];
        query_seconds += c->generation_seconds[b] / static_cast<double>(std::max<std::size_t>(1, c->batch_sizes[b]));
        ++batch_count;
      }
    }
    const double arms = static_cast<double>(std::max<std::size_t>(1, ok.size()));
    for (double& v : align_by_cp) v /= arms;
    for (double& v : ll_by_cp) v /= arms;
    auto mean_or_null = [](double total, std::size_t count) -> nlohmann::json {
      if (count == 0) return nullptr;
      return total / static_cast<double>(count);
    };
    m["alignment_auc_mean"] = mean_or_null(auc_align, auc_count);
    m["loglik_auc_mean"] = mean_or_null(auc_ll, auc_count);
    m["final_alignment_mean"] = mean_or_null(final_align, ok.size());
    m["final_loglik_mean"] = mean_or_null(final_ll, ok.size());
    m["queries"] = queries;
    m["alignment_mean"] = align_by_cp;
    m["loglik_mean"] = ll_by_cp;
    methods[name] = m;
    timing_batch[name] = mean_or_null(batch_seconds, batch_count);
    timing_query[name] = mean_or_null(query_seconds, batch_count);
  }
  summary["methods"] = methods;

  nlohmann::json tests = nlohmann::json::array();
  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    for (std::size_t j = i + 1; j < config.methods.size(); ++j) {
      const std::string& a = config.methods[i];
      const std::string& b = config.methods[j];
      std::vector<double> va, vb;
      for (const auto& [seed, value] : auc[a]) {
        auto it = auc[b].find(seed);
        if (it == auc[b].end()) continue;
        va.push_back(value);
        vb.push_back(it->second);
      }
      nlohmann::json t = {{"method_a", a}, {"method_b", b}, {"metric", "alignment_auc"}, {"pairs", va.size()}};
      double diff = 0.0;
      for (std::size_t s = 0; s < va.size(); ++s) diff += va[s] - vb[s];
      t["mean_difference"] = va.empty() ? nlohmann::json(nullptr) : nlohmann::json(diff / static_cast<double>(va.size()));
      if (va.size() >= 10) {
        t["p_value"] = WilcoxonSignedRank(va, vb);
      } else {
        t["p_value"] = nullptr;
        t["note"] = "fewer than 10 paired seeds";
      }
      tests.push_back(t);
    }
  }
  summary["wilcoxon"] = tests;
  summary["timing"] = {{"env", config.env_id},
                       {"K", config.dataset_size},
                       {"methods", config.methods},
                       {"per_query_seconds", timing_query},
                       {"per_batch_seconds", timing_batch}};
  summary["failures"] = failures;
  return summary;
}

ExperimentResult RunExperiment(const ExperimentConfig& config, const QueryDataset* dataset) {
  config.Validate();
  QueryDataset owned;
  if (dataset == nullptr) {
    if (!config.dataset_path.empty()) {
      owned = LoadDataset(config.dataset_path);
      Require(owned.env_id == config.env_id, ErrorCode::kConfiguration,
              "dataset environment '" + owned.env_id + "' does not match config env '" + config.env_id + "'");
    } else {
      const auto env = MakeEnvironment(config.env_id);
      owned = GenerateDataset(*env, config.dataset_size, config.dataset_seed, true);
    }
    dataset = &owned;
  }
  Require(dataset->size() >= config.n, ErrorCode::kConfiguration, "dataset has fewer than N queries");

  std::vector<MethodKind> kinds;
  for (const std::string& m : config.methods) kinds.push_back(ParseMethod(m));

  ExperimentResult result;
  if (std::find(kinds.begin(), kinds.end(), MethodKind::kAnnealing) != kinds.end()) {
    result.annealing_evaluations = config.annealing_evaluations > 0 ? config.annealing_evaluations
                                                                     : CalibrateAnnealing(config, *dataset);
  }

  const std::size_t arms = kinds.size() * config.seeds;
  result.curves.resize(arms);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t a = next++; a < arms; a = next++) {
      const MethodKind kind = kinds[a / config.seeds];
      const std::uint64_t seed = a % config.seeds;
      LearningCurve& curve = result.curves[a];
      curve = RunArm(config, kind, seed, *dataset, result.annealing_evaluations);
      if (config.output_dir.empty() || curve.failed) continue;
      try {
        WriteFileAtomic(config.output_dir + "/arms/" + curve.method + "_seed" + std::to_string(seed) + ".csv",
                        CurveCsvHeader() + CurveCsvRows(curve, config.record_timing));
      } catch (const std::exception& e) {
        curve.failed = true;
        curve.error = e.what();
      }
    }
  };
  const std::size_t threads = std::min(config.workers, arms);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  result.summary = SummarizeCurves(config, result.curves);
  result.summary["annealing_evaluations"] = result.annealing_evaluations;
  if (!config.output_dir.empty()) {
    std::string csv = CurveCsvHeader();
    for (const LearningCurve& c : result.curves) csv += CurveCsvRows(c, config.record_timing);
    WriteFileAtomic(config.output_dir + "/curves.csv", csv);
    WriteFileAtomic(config.output_dir + "/summary.json", result.summary.dump(2) + "\n");
  }
  return result;
}

}  // namespace batchpref
