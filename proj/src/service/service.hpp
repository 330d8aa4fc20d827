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

#ifndef BATCHPREF_SERVICE_SERVICE_HPP_
#define BATCHPREF_SERVICE_SERVICE_HPP_

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bench/bench.hpp"
#include "envs/environment.hpp"

namespace batchpref {

// Append-only JSON-lines file. Each Append is flushed and fsynced before it
// returns, so an acknowledged event survives a crash.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void Append(const nlohmann::json& event);
  std::size_t count() const { return count_; }
  const std::filesystem::path& path() const { return path_; }

  // Parses every complete line; a torn final line (crash mid-write) is
  // dropped. Throws kIo on a malformed line elsewhere.
  static std::vector<nlohmann::json> ReadAll(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::size_t count_ = 0;
};

// Datasets keyed by (env, K, seed), generated once and cached on disk.
class DatasetCache {
 public:
  explicit DatasetCache(std::filesystem::path dir);
  std::shared_ptr<const QueryDataset> Get(const std::string& env_id, std::size_t size, std::uint64_t seed);

 private:
  std::filesystem::path dir_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const QueryDataset>> cache_;
};

struct SessionParams {
  std::string env_id = "driver";
  std::string method = "dpp";
  std::size_t k = 10;
  std::size_t n = 200;
  std::size_t m = 1000;
  std::uint64_t seed = 0;
  std::size_t dataset_size = 100000;
  std::uint64_t dataset_seed = 0;
  std::optional<Vector> w_true;  // declared true weights of a simulated user

  nlohmann::json ToJson() const;
  static SessionParams FromJson(const nlohmann::json& j);
};

class Session {
 public:
  // Validates params and writes the create event.
  static std::shared_ptr<Session> Create(std::string id, SessionParams params, DatasetCache& datasets,
                                         const std::filesystem::path& dir);
  // Rebuilds a session from its snapshot (if any) and event log. A pending
  // batch is regenerated from the seed and response history.
  static std::shared_ptr<Session> Restore(const std::filesystem::path& dir, DatasetCache& datasets);

  const std::string& id() const { return id_; }

  // Returns the pending batch, generating it first if there is none.
  nlohmann::json NextBatch();
  // Body {"responses": [{"query_id", "choice"}]}. Answers are buffered until
  // every query of the pending batch is answered, then committed together.
  nlohmann::json SubmitResponses(const nlohmann::json& body);
  nlohmann::json Summary();

 private:
  Session(std::string id, SessionParams params, std::shared_ptr<const QueryDataset> dataset,
          const std::filesystem::path& dir);

  void Apply(const nlohmann::json& event);
  void ApplyAnswers(const std::vector<std::pair<std::size_t, int>>& answers);
  void EnsureFreshBelief();
  IndexList GenerateBatch();
  nlohmann::json BatchPayload() const;
  nlohmann::json TrajectoryJson(const Trajectory& t) const;
  void WriteSnapshot();

  std::mutex mu_;
  std::string id_;
  SessionParams params_;
  std::shared_ptr<const QueryDataset> dataset_;
  std::unique_ptr<Environment> env_;
  std::filesystem::path dir_;
  std::unique_ptr<EventLog> log_;
  std::string created_at_;

  BeliefState belief_;
  bool belief_fresh_ = false;
  std::optional<IndexList> pending_;
  std::map<std::size_t, int> buffered_;
  std::size_t batches_completed_ = 0;
  bool restored_batch_matches_ = true;
};

class SessionStore {
 public:
  SessionStore(std::filesystem::path dir, DatasetCache& datasets);

  std::shared_ptr<Session> Create(SessionParams params);
  // Throws kNotFound.
  std::shared_ptr<Session> Find(const std::string& id);
  // Restores every session directory under the store root.
  std::size_t LoadAll();

 private:
  std::filesystem::path dir_;
  DatasetCache& datasets_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string data_dir = "batchpref-data";
  std::string default_env = "driver";
  std::size_t dataset_size = 100000;
  std::uint64_t dataset_seed = 0;
  std::string static_dir;  // served at / when set
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

int HttpStatusFor(ErrorCode code);

class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Transport-independent request handling; the HTTP server delegates here.
  HttpResponse Handle(const std::string& method, const std::string& path, const std::string& body);

  // Binds and serves on a background thread. Throws kIo if the port is taken.
  void Start();
  void Stop();
  int port() const { return bound_port_; }
  const ServiceOptions& options() const { return options_; }

 private:
  struct Server;
  ServiceOptions options_;
  DatasetCache datasets_;
  SessionStore store_;
  std::unique_ptr<Server> server_;
  int bound_port_ = 0;
};

}  // namespace batchpref

#endif  // BATCHPREF_SERVICE_SERVICE_HPP_
