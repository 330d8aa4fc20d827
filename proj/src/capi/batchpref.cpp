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

#include "batchpref/batchpref.h"

#include <cstdlib>
#include <cstring>
#include <set>
#include <string>

#include "bench/bench.hpp"
#include "envs/dataset.hpp"
#include "service/service.hpp"

struct bp_dataset {
  batchpref::QueryDataset dataset;
};

struct bp_service {
  std::unique_ptr<batchpref::Service> service;
};

namespace {

thread_local std::string last_error;

bp_status Record(bp_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
bp_status Guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return BP_OK;
  } catch (const batchpref::Error& e) {
    return Record(static_cast<bp_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Record(BP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Record(BP_ERR_INTERNAL, e.what());
  }
}

void RequirePointer(const void* p, const char* what) {
  batchpref::Require(p != nullptr, batchpref::ErrorCode::kInvalidInput, std::string(what) + " must not be null");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json ParseJson(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return nlohmann::json::object();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    batchpref::Fail(batchpref::ErrorCode::kConfiguration, std::string(what) + " is not valid JSON: " + e.what());
  }
}

}  // namespace

extern "C" {

const char* bp_version(void) { return "0.1.0"; }

const char* bp_last_error(void) { return last_error.c_str(); }

const char* bp_status_name(bp_status status) {
  if (status == BP_OK) return "ok";
  if (status == BP_ERR_INTERNAL) return "internal";
  if (status >= BP_ERR_INVALID_INPUT && status <= BP_ERR_CONFLICT) {
    return batchpref::ErrorCodeName(static_cast<batchpref::ErrorCode>(status));
  }
  return "unknown";
}

void bp_string_free(char* s) { std::free(s); }

bp_status bp_envs_json(char** out_json) {
  return Guard([&] {
    RequirePointer(out_json, "out_json");
    nlohmann::json envs = nlohmann::json::array();
    for (const auto& info : batchpref::ListEnvironments()) {
      const auto env = batchpref::MakeEnvironment(info.id);
      envs.push_back({{"id", info.id},
                      {"description", info.description},
                      {"feature_dim", env->feature_dim()},
                      {"horizon", env->horizon()},
                      {"dim_x", env->dim_x()},
                      {"dim_u", env->dim_u()}});
    }
    *out_json = CopyString(envs.dump());
  });
}

bp_status bp_dataset_generate(const char* env_id, size_t count, uint64_t seed, int standardize, bp_dataset** out) {
  return Guard([&] {
    RequirePointer(env_id, "env_id");
    RequirePointer(out, "out");
    batchpref::Require(count >= 1, batchpref::ErrorCode::kInvalidInput, "K must be >= 1");
    const auto env = batchpref::MakeEnvironment(env_id);
    auto handle = std::make_unique<bp_dataset>();
    handle->dataset = batchpref::GenerateDataset(*env, count, seed, standardize != 0);
    *out = handle.release();
  });
}

bp_status bp_dataset_load(const char* path, bp_dataset** out) {
  return Guard([&] {
    RequirePointer(path, "path");
    RequirePointer(out, "out");
    auto handle = std::make_unique<bp_dataset>();
    handle->dataset = batchpref::LoadDataset(path);
    *out = handle.release();
  });
}

bp_status bp_dataset_save(const bp_dataset* dataset, const char* path, int overwrite) {
  return Guard([&] {
    RequirePointer(dataset, "dataset");
    RequirePointer(path, "path");
    batchpref::SaveDataset(dataset->dataset, path, overwrite != 0);
  });
}

bp_status bp_dataset_info(const bp_dataset* dataset, char** out_json) {
  return Guard([&] {
    RequirePointer(dataset, "dataset");
    RequirePointer(out_json, "out_json");
    const auto& d = dataset->dataset;
    const nlohmann::json info = {{"env", d.env_id},     {"K", d.size()},         {"d", d.feature_dim},
                                 {"T", d.horizon},      {"dim_x", d.dim_x},      {"dim_u", d.dim_u},
                                 {"seed", d.seed},      {"standardized", d.feature_stats.standardized}};
    *out_json = CopyString(info.dump());
  });
}

bp_status bp_dataset_psi(const bp_dataset* dataset, size_t index, double* out, size_t capacity) {
  return Guard([&] {
    RequirePointer(dataset, "dataset");
    RequirePointer(out, "out");
    const auto& d = dataset->dataset;
    batchpref::Require(index < d.size(), batchpref::ErrorCode::kInvalidInput, "query index out of range");
    batchpref::Require(capacity >= d.feature_dim, batchpref::ErrorCode::kInvalidInput, "output buffer too small");
    for (std::size_t j = 0; j < d.feature_dim; ++j) {
      out[j] = d.psi(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(j));
    }
  });
}

void bp_dataset_free(bp_dataset* dataset) { delete dataset; }

bp_status bp_benchmark_run(const char* config_json, char** out_summary_json) {
  return Guard([&] {
    RequirePointer(out_summary_json, "out_summary_json");
    const auto config = batchpref::ExperimentConfigFromJson(ParseJson(config_json, "benchmark config"));
    const auto result = batchpref::RunExperiment(config);
    *out_summary_json = CopyString(result.summary.dump(2));
  });
}

bp_status bp_service_create(const char* options_json, bp_service** out) {
  return Guard([&] {
    RequirePointer(out, "out");
    const nlohmann::json j = ParseJson(options_json, "service options");
    batchpref::Require(j.is_object(), batchpref::ErrorCode::kConfiguration, "service options must be an object");
    static const std::set<std::string> kKeys = {"host",         "port",         "data_dir",  "default_env",
                                                "dataset_size", "dataset_seed", "static_dir"};
    for (const auto& [key, value] : j.items()) {
      batchpref::Require(kKeys.count(key) > 0, batchpref::ErrorCode::kConfiguration,
                         "unknown service option '" + key + "'");
    }
    batchpref::ServiceOptions options;
    try {
      options.host = j.value("host", options.host);
      options.port = j.value("port", options.port);
      options.data_dir = j.value("data_dir", options.data_dir);
      options.default_env = j.value("default_env", options.default_env);
      options.dataset_size = j.value("dataset_size", options.dataset_size);
      options.dataset_seed = j.value("dataset_seed", options.dataset_seed);
      options.static_dir = j.value("static_dir", options.static_dir);
    } catch (const nlohmann::json::exception& e) {
      batchpref::Fail(batchpref::ErrorCode::kConfiguration, std::string("bad service option: ") + e.what());
    }
    batchpref::Require(options.port >= 0 && options.port <= 65535, batchpref::ErrorCode::kConfiguration,
                       "port must be in [0, 65535]");
    batchpref::Require(options.dataset_size >= 1, batchpref::ErrorCode::kConfiguration, "dataset_size must be >= 1");
    auto handle = std::make_unique<bp_service>();
    handle->service = std::make_unique<batchpref::Service>(options);
    *out = handle.release();
  });
}

bp_status bp_service_start(bp_service* service) {
  return Guard([&] {
    RequirePointer(service, "service");
    service->service->Start();
  });
}

bp_status bp_service_stop(bp_service* service) {
  return Guard([&] {
    RequirePointer(service, "service");
    service->service->Stop();
  });
}

int bp_service_port(const bp_service* service) { return service == nullptr ? 0 : service->service->port(); }

bp_status bp_service_handle(bp_service* service, const char* method, const char* path, const char* body,
                            int* out_http_status, char** out_body) {
  return Guard([&] {
    RequirePointer(service, "service");
    RequirePointer(method, "method");
    RequirePointer(path, "path");
    RequirePointer(out_http_status, "out_http_status");
    RequirePointer(out_body, "out_body");
    const batchpref::HttpResponse response = service->service->Handle(method, path, body == nullptr ? "" : body);
    *out_body = CopyString(response.body);
    *out_http_status = response.status;
  });
}

void bp_service_free(bp_service* service) { delete service; }

bp_status bp_mutual_information(const double* psis, size_t n, size_t d, const double* samples, size_t m,
                                double* out_scores) {
  return Guard([&] {
    RequirePointer(psis, "psis");
    RequirePointer(samples, "samples");
    RequirePointer(out_scores, "out_scores");
    batchpref::Require(n >= 1 && d >= 1 && m >= 1, batchpref::ErrorCode::kInvalidInput, "sizes must be >= 1");
    const auto ni = static_cast<Eigen::Index>(n);
    const auto di = static_cast<Eigen::Index>(d);
    const auto mi = static_cast<Eigen::Index>(m);
    const batchpref::RowMatrix p = Eigen::Map<const batchpref::RowMatrix>(psis, ni, di);
    const batchpref::RowMatrix w = Eigen::Map<const batchpref::RowMatrix>(samples, mi, di);
    const batchpref::Vector scores = batchpref::MutualInformationBatch(p, w);
    std::memcpy(out_scores, scores.data(), n * sizeof(double));
  });
}

bp_status bp_alignment(const double* a, const double* b, size_t d, double* out) {
  return Guard([&] {
    RequirePointer(a, "a");
    RequirePointer(b, "b");
    RequirePointer(out, "out");
    const auto di = static_cast<Eigen::Index>(d);
    *out = batchpref::Alignment(Eigen::Map<const batchpref::Vector>(a, di), Eigen::Map<const batchpref::Vector>(b, di));
  });
}

bp_status bp_wilcoxon(const double* a, const double* b, size_t n, double* out_p) {
  return Guard([&] {
    RequirePointer(a, "a");
    RequirePointer(b, "b");
    RequirePointer(out_p, "out_p");
    *out_p = batchpref::WilcoxonSignedRank({a, n}, {b, n});
  });
}

}  // extern "C"
