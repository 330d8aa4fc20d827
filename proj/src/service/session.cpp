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
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

#include "envs/dataset.hpp"
#include "service/service.hpp"

namespace batchpref {
namespace {

constexpr const char* kEventsFile = "events.jsonl";
constexpr const char* kSnapshotFile = "snapshot.json";

// Seed stream tags.
constexpr std::uint64_t kTagBelief = 1;
constexpr std::uint64_t kTagSelection = 2;

std::string UtcNow() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> ToStd(const Vector& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json RowsToJson(const RowMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).data(), m.row(r).data() + m.cols()));
  }
  return rows;
}

double Quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

template <typename T>
T Field(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    Fail(ErrorCode::kInvalidInput, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

nlohmann::json SessionParams::ToJson() const {
  nlohmann::json j = {{"env", env_id},           {"method", method}, {"k", k},
                      {"N", n},                  {"M", m},           {"seed", seed},
                      {"dataset_size", dataset_size}, {"dataset_seed", dataset_seed}};
  j["w_true"] = w_true ? nlohmann::json(ToStd(*w_true)) : nlohmann::json(nullptr);
  return j;
}

SessionParams SessionParams::FromJson(const nlohmann::json& j) {
  Require(j.is_object(), ErrorCode::kInvalidInput, "session parameters must be a JSON object");
  SessionParams p;
  p.env_id = Field<std::string>(j, "env", p.env_id);
  p.method = Field<std::string>(j, "method", p.method);
  p.k = Field<std::size_t>(j, "k", p.k);
  p.n = Field<std::size_t>(j, "N", p.n);
  p.m = Field<std::size_t>(j, "M", p.m);
  p.seed = Field<std::uint64_t>(j, "seed", p.seed);
  p.dataset_size = Field<std::size_t>(j, "dataset_size", p.dataset_size);
  p.dataset_seed = Field<std::uint64_t>(j, "dataset_seed", p.dataset_seed);
  const auto w = Field<std::vector<double>>(j, "w_true", {});
  if (!w.empty()) p.w_true = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  return p;
}

Session::Session(std::string id, SessionParams params, std::shared_ptr<const QueryDataset> dataset,
                 const std::filesystem::path& dir)
    : id_(std::move(id)),
      params_(std::move(params)),
      dataset_(std::move(dataset)),
      env_(MakeEnvironment(params_.env_id)),
      dir_(dir),
      belief_(dataset_->feature_dim, 0, AdaptiveMetropolisConfig::ForSampleCount(static_cast<int>(params_.m))) {}

std::shared_ptr<Session> Session::Create(std::string id, SessionParams params, DatasetCache& datasets,
                                         const std::filesystem::path& dir) {
  MakeEnvironment(params.env_id);  // kNotFound for an unknown env
  const MethodKind kind = ParseMethod(params.method);
  Require(kind != MethodKind::kSequential, ErrorCode::kInvalidInput, "sessions need a batch method");
  Require(params.k >= 1, ErrorCode::kInvalidInput, "k must be >= 1");
  Require(params.k <= params.n, ErrorCode::kInvalidInput, "k must not exceed N");
  Require(params.n <= params.dataset_size, ErrorCode::kInvalidInput, "N must not exceed the dataset size K");
  Require(params.m >= 1 && params.m <= 100000, ErrorCode::kInvalidInput, "M must be in [1, 100000]");
  if (kind == MethodKind::kAnnealing) {
    Require(params.k <= kMaxJointBatch, ErrorCode::kInvalidInput, "annealing needs k <= 20");
  }
  auto dataset = datasets.Get(params.env_id, params.dataset_size, params.dataset_seed);
  if (params.w_true) {
    Require(static_cast<std::size_t>(params.w_true->size()) == dataset->feature_dim, ErrorCode::kInvalidInput,
            "w_true must have one entry per feature");
    Require(params.w_true->allFinite() && params.w_true->norm() > 0.0, ErrorCode::kInvalidInput,
            "w_true must be finite and nonzero");
  }

  std::filesystem::create_directories(dir);
  std::shared_ptr<Session> s(new Session(std::move(id), std::move(params), std::move(dataset), dir));
  s->created_at_ = UtcNow();
  s->log_ = std::make_unique<EventLog>(dir / kEventsFile);
  s->log_->Append({{"type", "create"},
                   {"session_id", s->id_},
                   {"created_at", s->created_at_},
                   {"params", s->params_.ToJson()}});
  return s;
}

std::shared_ptr<Session> Session::Restore(const std::filesystem::path& dir, DatasetCache& datasets) {
  const std::vector<nlohmann::json> events = EventLog::ReadAll(dir / kEventsFile);
  Require(!events.empty() && events[0].value("type", "") == "create", ErrorCode::kIo,
          "event log in '" + dir.string() + "' does not start with a create event");
  SessionParams params = SessionParams::FromJson(events[0].at("params"));
  auto dataset = datasets.Get(params.env_id, params.dataset_size, params.dataset_seed);
  std::shared_ptr<Session> s(
      new Session(events[0].at("session_id").get<std::string>(), std::move(params), std::move(dataset), dir));
  s->created_at_ = events[0].value("created_at", "");

  std::size_t replay_from = 1;
  const auto snapshot_path = dir / kSnapshotFile;
  if (std::filesystem::exists(snapshot_path)) {
    try {
      std::ifstream in(snapshot_path);
      const nlohmann::json snap = nlohmann::json::parse(in);
      const auto event_count = snap.at("event_count").get<std::size_t>();
      if (event_count >= 1 && event_count <= events.size()) {
        for (const auto& r : snap.at("responses")) {
          const auto index = r.at(0).get<std::size_t>();
          Require(index < s->dataset_->size(), ErrorCode::kIo, "snapshot refers to an unknown query");
          PreferenceResponse response;
          response.query_index = index;
          response.choice = r.at(1).get<int>();
          response.responder = Responder::kHuman;
          s->belief_.AddResponse(response, s->dataset_->psi_row(index));
        }
        s->batches_completed_ = snap.at("batches_completed").get<std::size_t>();
        replay_from = event_count;
      }
    } catch (const std::exception&) {
      // Unusable snapshot: rebuild everything from the log.
      s->belief_ = BeliefState(s->dataset_->feature_dim, 0,
                               AdaptiveMetropolisConfig::ForSampleCount(static_cast<int>(s->params_.m)));
      s->batches_completed_ = 0;
      replay_from = 1;
    }
  }
  for (std::size_t i = replay_from; i < events.size(); ++i) s->Apply(events[i]);
  s->log_ = std::make_unique<EventLog>(dir / kEventsFile);

  if (s->pending_) {
    const IndexList regenerated = s->GenerateBatch();
    s->restored_batch_matches_ = regenerated == *s->pending_;
  }
  return s;
}

void Session::Apply(const nlohmann::json& event) {
  const std::string type = event.at("type").get<std::string>();
  if (type == "batch_issued") {
    pending_ = event.at("query_ids").get<IndexList>();
    buffered_.clear();
  } else if (type == "answers") {
    std::vector<std::pair<std::size_t, int>> answers;
    for (const auto& a : event.at("answers")) {
      answers.emplace_back(a.at("query_id").get<std::size_t>(), a.at("choice").get<int>());
    }
    ApplyAnswers(answers);
  } else {
    Fail(ErrorCode::kIo, "unknown event type '" + type + "'");
  }
}

void Session::ApplyAnswers(const std::vector<std::pair<std::size_t, int>>& answers) {
  Require(pending_.has_value(), ErrorCode::kState, "answers without a pending batch");
  for (const auto& [query, choice] : answers) buffered_[query] = choice;
  if (buffered_.size() < pending_->size()) return;
  for (std::size_t index : *pending_) {
    PreferenceResponse response;
    response.query_index = index;
    response.choice = buffered_.at(index);
    response.responder = Responder::kHuman;
    belief_.AddResponse(response, dataset_->psi_row(index));
  }
  ++batches_completed_;
  pending_.reset();
  buffered_.clear();
  belief_fresh_ = false;
}

void Session::EnsureFreshBelief() {
  if (belief_fresh_) return;
  belief_.set_seed(DeriveSeed(params_.seed, {kTagBelief, batches_completed_}));
  belief_.Resample();
  belief_fresh_ = true;
}

IndexList Session::GenerateBatch() {
  EnsureFreshBelief();
  SelectionOptions options;
  options.seed = DeriveSeed(params_.seed, {kTagSelection, batches_completed_});
  options.annealing.max_evaluations = 1000;
  options.annealing.seconds = 60.0;
  return SelectQueries(ParseMethod(params_.method), *dataset_, belief_.samples(), params_.k, params_.n, options);
}

nlohmann::json Session::TrajectoryJson(const Trajectory& t) const {
  return {{"states", RowsToJson(t.states)}, {"actions", RowsToJson(t.actions)}, {"features", ToStd(t.features)}};
}

nlohmann::json Session::BatchPayload() const {
  nlohmann::json queries = nlohmann::json::array();
  for (std::size_t index : *pending_) {
    const Query q = MaterializeQuery(*env_, *dataset_, index);
    queries.push_back({{"query_id", index},
                       {"trajectory_a", TrajectoryJson(q.traj_a)},
                       {"trajectory_b", TrajectoryJson(q.traj_b)},
                       {"psi", ToStd(q.psi)},
                       {"answered", buffered_.count(index) > 0}});
  }
  return {{"session_id", id_},
          {"batch_number", batches_completed_},
          {"env", params_.env_id},
          {"horizon", dataset_->horizon},
          {"scripted_path", RowsToJson(env_->ScriptedPath())},
          {"queries", queries}};
}

nlohmann::json Session::NextBatch() {
  std::lock_guard<std::mutex> lock(mu_);
  if (!pending_) {
    const IndexList batch = GenerateBatch();
    log_->Append({{"type", "batch_issued"}, {"batch", batches_completed_}, {"query_ids", batch}});
    pending_ = batch;
    buffered_.clear();
  }
  return BatchPayload();
}

nlohmann::json Session::SubmitResponses(const nlohmann::json& body) {
  std::lock_guard<std::mutex> lock(mu_);
  Require(body.is_object() && body.contains("responses") && body["responses"].is_array(),
          ErrorCode::kInvalidInput, "body must be {\"responses\": [...]}");
  const nlohmann::json& items = body["responses"];
  Require(!items.empty(), ErrorCode::kInvalidInput, "no responses given");
  Require(pending_.has_value(), ErrorCode::kConflict, "no pending batch; request one first");

  const std::set<std::size_t> pending(pending_->begin(), pending_->end());
  std::set<std::size_t> seen;
  std::vector<std::pair<std::size_t, int>> answers;
  for (const auto& item : items) {
    Require(item.is_object() && item.contains("query_id") && item.contains("choice"), ErrorCode::kInvalidInput,
            "each response needs query_id and choice");
    Require(item["query_id"].is_number_unsigned() || (item["query_id"].is_number_integer() && item["query_id"].get<long long>() >= 0),
            ErrorCode::kInvalidInput, "query_id must be a non-negative integer");
    Require(item["choice"].is_number_integer(), ErrorCode::kInvalidInput, "choice must be +1 or -1");
    const auto query = item["query_id"].get<std::size_t>();
    const int choice = item["choice"].get<int>();
    Require(choice == 1 || choice == -1, ErrorCode::kInvalidInput, "choice must be +1 or -1");
    Require(pending.count(query) > 0, ErrorCode::kInvalidInput,
            "query_id " + std::to_string(query) + " is not in the pending batch");
    Require(seen.insert(query).second, ErrorCode::kInvalidInput,
            "query_id " + std::to_string(query) + " appears twice");
    Require(buffered_.count(query) == 0, ErrorCode::kConflict,
            "query_id " + std::to_string(query) + " was already answered");
    answers.emplace_back(query, choice);
  }

  nlohmann::json logged = nlohmann::json::array();
  for (const auto& [query, choice] : answers) logged.push_back({{"query_id", query}, {"choice", choice}});
  log_->Append({{"type", "answers"}, {"batch", batches_completed_}, {"answers", logged}});
  const std::size_t before = batches_completed_;
  ApplyAnswers(answers);
  const bool committed = batches_completed_ > before;
  if (committed) WriteSnapshot();
  return {{"accepted", answers.size()},
          {"committed", committed},
          {"buffered", buffered_.size()},
          {"answered_count", belief_.responses().size()}};
}

nlohmann::json Session::Summary() {
  std::lock_guard<std::mutex> lock(mu_);
  EnsureFreshBelief();
  const RowMatrix& samples = belief_.samples();
  const Vector mean = MeanWeight(belief_);
  nlohmann::json quantiles = nlohmann::json::array();
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    std::vector<double> column(samples.rows());
    for (Eigen::Index r = 0; r < samples.rows(); ++r) column[static_cast<std::size_t>(r)] = samples(r, c);
    quantiles.push_back({{"q10", Quantile(column, 0.1)}, {"q50", Quantile(column, 0.5)}, {"q90", Quantile(column, 0.9)}});
  }
  nlohmann::json out = {{"session_id", id_},
                        {"env", params_.env_id},
                        {"method", params_.method},
                        {"k", params_.k},
                        {"N", params_.n},
                        {"M", params_.m},
                        {"seed", params_.seed},
                        {"created_at", created_at_},
                        {"answered_count", belief_.responses().size()},
                        {"batches_completed", batches_completed_},
                        {"pending_batch", pending_.has_value()},
                        {"buffered_answers", buffered_.size()},
                        {"mean_weight", ToStd(mean)},
                        {"quantiles", quantiles},
                        {"acceptance_rate", belief_.diagnostics().acceptance_rate},
                        {"restored_batch_matches", restored_batch_matches_}};
  out["alignment"] = params_.w_true ? nlohmann::json(Alignment(*params_.w_true, mean)) : nlohmann::json(nullptr);
  return out;
}

void Session::WriteSnapshot() {
  nlohmann::json responses = nlohmann::json::array();
  for (const StoredResponse& r : belief_.responses()) {
    responses.push_back({r.response.query_index, r.response.choice});
  }
  const nlohmann::json snap = {{"event_count", log_->count()},
                               {"batches_completed", batches_completed_},
                               {"responses", responses}};
  try {
    WriteFileAtomic((dir_ / kSnapshotFile).string(), snap.dump() + "\n");
  } catch (const Error&) {
    // The log stays authoritative; a stale snapshot only lengthens replay.
  }
}

}  // namespace batchpref
