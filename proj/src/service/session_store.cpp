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

#include <iostream>
#include <random>

#include "envs/dataset.hpp"
#include "service/service.hpp"

namespace batchpref {
namespace {

std::string NewSessionId() {
  static std::mutex mu;
  static std::random_device device;
  std::lock_guard<std::mutex> lock(mu);
  static const char* kHex = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t word = device();
    for (int j = 0; j < 8; ++j) {
      id.push_back(kHex[word & 0xF]);
      word >>= 4;
    }
  }
  return id;
}

}  // namespace

DatasetCache::DatasetCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::shared_ptr<const QueryDataset> DatasetCache::Get(const std::string& env_id, std::size_t size,
                                                      std::uint64_t seed) {
  const std::string key = env_id + "_K" + std::to_string(size) + "_seed" + std::to_string(seed);
  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const auto env = MakeEnvironment(env_id);
  const std::filesystem::path file = dir_ / (key + ".bpqd");
  std::shared_ptr<QueryDataset> dataset;
  if (std::filesystem::exists(file)) {
    try {
      auto loaded = std::make_shared<QueryDataset>(LoadDataset(file.string()));
      if (loaded->env_id == env_id && loaded->size() == size && loaded->seed == seed) dataset = loaded;
    } catch (const Error&) {
      // Regenerated below.
    }
  }
  if (!dataset) {
    dataset = std::make_shared<QueryDataset>(GenerateDataset(*env, size, seed, true));
    try {
      std::filesystem::create_directories(dir_);
      SaveDataset(*dataset, file.string(), true);
    } catch (const std::exception&) {
      // Caching is an optimization; generation is deterministic.
    }
  }
  cache_[key] = dataset;
  return dataset;
}

SessionStore::SessionStore(std::filesystem::path dir, DatasetCache& datasets)
    : dir_(std::move(dir)), datasets_(datasets) {}

std::shared_ptr<Session> SessionStore::Create(SessionParams params) {
  std::string id = NewSessionId();
  {
    std::lock_guard<std::mutex> lock(mu_);
    while (sessions_.count(id) > 0 || std::filesystem::exists(dir_ / id)) id = NewSessionId();
  }
  auto session = Session::Create(id, std::move(params), datasets_, dir_ / id);
  std::lock_guard<std::mutex> lock(mu_);
  sessions_[id] = session;
  return session;
}

std::shared_ptr<Session> SessionStore::Find(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  Require(it != sessions_.end(), ErrorCode::kNotFound, "unknown session '" + id + "'");
  return it->second;
}

std::size_t SessionStore::LoadAll() {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir_, ec)) return 0;
  std::size_t loaded = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_directory() || !std::filesystem::exists(entry.path() / "events.jsonl")) continue;
    try {
      auto session = Session::Restore(entry.path(), datasets_);
      std::lock_guard<std::mutex> lock(mu_);
      sessions_[session->id()] = session;
      ++loaded;
    } catch (const std::exception& e) {
      std::cerr << "batchpref: skipping session in " << entry.path() << ": " << e.what() << "\n";
    }
  }
  return loaded;
}

}  // namespace batchpref
