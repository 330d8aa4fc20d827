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

// batchpref command-line tool: dataset generation, benchmarks and the
// elicitation service. Talks to the engine only through the C API.

#include <signal.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "batchpref/batchpref.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::string OneLine(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int ReportError(const std::string& code, const std::string& message, int exit_code) {
  std::cerr << "batchpref: error code=" << code << " message=" << nlohmann::json(OneLine(message)).dump() << "\n";
  return exit_code;
}

int ReportStatus(bp_status status) {
  const int exit_code = status == BP_ERR_CONFIGURATION ? kExitUsage : kExitRuntime;
  return ReportError(bp_status_name(status), bp_last_error(), exit_code);
}

struct TakeString {
  char* p = nullptr;
  ~TakeString() { bp_string_free(p); }
};

int Generate(const std::string& env, std::size_t count, std::uint64_t seed, const std::string& out, bool force,
             bool raw) {
  bp_dataset* dataset = nullptr;
  bp_status status = bp_dataset_generate(env.c_str(), count, seed, raw ? 0 : 1, &dataset);
  if (status != BP_OK) return ReportStatus(status);
  status = bp_dataset_save(dataset, out.c_str(), force ? 1 : 0);
  TakeString info;
  if (status == BP_OK) status = bp_dataset_info(dataset, &info.p);
  bp_dataset_free(dataset);
  if (status != BP_OK) return ReportStatus(status);
  std::cout << info.p << "\n";
  return kExitOk;
}

struct BenchmarkFlags {
  std::string config;
  std::optional<std::string> env;
  std::optional<std::size_t> dataset_size, k, n, m, batches, seeds, workers;
  std::optional<std::uint64_t> base_seed;
  std::optional<std::string> methods, out;
};

int Benchmark(const BenchmarkFlags& flags) {
  nlohmann::json config = nlohmann::json::object();
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in.good()) return ReportError("io", "cannot open config '" + flags.config + "'", kExitRuntime);
    try {
      config = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      return ReportError("configuration", std::string("config is not valid JSON: ") + e.what(), kExitUsage);
    }
    if (!config.is_object()) return ReportError("configuration", "config must be a JSON object", kExitUsage);
  }
  if (flags.env) config["env"] = *flags.env;
  if (flags.dataset_size) config["K"] = *flags.dataset_size;
  if (flags.k) config["k"] = *flags.k;
  if (flags.n) config["N"] = *flags.n;
  if (flags.m) config["M"] = *flags.m;
  if (flags.batches) config["batches"] = *flags.batches;
  if (flags.seeds) config["seeds"] = *flags.seeds;
  if (flags.workers) config["workers"] = *flags.workers;
  if (flags.base_seed) config["base_seed"] = *flags.base_seed;
  if (flags.out) config["output_dir"] = *flags.out;
  if (flags.methods) {
    std::vector<std::string> methods;
    std::string item;
    for (char c : *flags.methods + ",") {
      if (c == ',') {
        if (!item.empty()) methods.push_back(item);
        item.clear();
      } else if (c != ' ') {
        item.push_back(c);
      }
    }
    config["methods"] = methods;
  }
  TakeString summary;
  const bp_status status = bp_benchmark_run(config.dump().c_str(), &summary.p);
  if (status != BP_OK) return ReportStatus(status);
  std::cout << summary.p << "\n";
  return kExitOk;
}

struct ServeFlags {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "batchpref-data";
  std::string env = "driver";
  std::size_t dataset_size = 100000;
  std::uint64_t dataset_seed = 0;
  std::string static_dir;
};

int Serve(const ServeFlags& flags) {
  // Block termination signals before any server thread exists, then wait for
  // them synchronously so shutdown runs outside a signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const nlohmann::json options = {{"host", flags.host},
                                  {"port", flags.port},
                                  {"data_dir", flags.data_dir},
                                  {"default_env", flags.env},
                                  {"dataset_size", flags.dataset_size},
                                  {"dataset_seed", flags.dataset_seed},
                                  {"static_dir", flags.static_dir}};
  bp_service* service = nullptr;
  bp_status status = bp_service_create(options.dump().c_str(), &service);
  if (status != BP_OK) return ReportStatus(status);
  status = bp_service_start(service);
  if (status != BP_OK) {
    const int code = ReportStatus(status);
    bp_service_free(service);
    return code;
  }
  std::cout << "listening " << flags.host << ":" << bp_service_port(service) << std::endl;
  int received = 0;
  sigwait(&signals, &received);
  bp_service_stop(service);
  bp_service_free(service);
  std::cout << "stopped" << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batchpref: batch active preference-based reward learning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bp_version());

  std::string gen_env, gen_out;
  std::size_t gen_count = 100000;
  std::uint64_t gen_seed = 0;
  bool gen_force = false, gen_raw = false;
  CLI::App* generate = app.add_subcommand("generate", "Generate a query dataset file");
  generate->add_option("--env", gen_env, "Environment id")->required();
  generate->add_option("--K", gen_count, "Number of queries")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_seed, "Dataset seed");
  generate->add_option("--out", gen_out, "Output file")->required();
  generate->add_flag("--force", gen_force, "Overwrite an existing file");
  generate->add_flag("--raw", gen_raw, "Keep raw (unstandardized) features");

  BenchmarkFlags bench;
  CLI::App* benchmark = app.add_subcommand("benchmark", "Run a method-comparison experiment");
  benchmark->add_option("--config", bench.config, "Benchmark config JSON")->check(CLI::ExistingFile);
  benchmark->add_option("--env", bench.env, "Environment id");
  benchmark->add_option("--K", bench.dataset_size, "Dataset size");
  benchmark->add_option("--k", bench.k, "Batch size");
  benchmark->add_option("--N", bench.n, "Reduced set size");
  benchmark->add_option("--M", bench.m, "Posterior samples");
  benchmark->add_option("--batches", bench.batches, "Batches per run");
  benchmark->add_option("--seeds", bench.seeds, "Paired seeds");
  benchmark->add_option("--methods", bench.methods, "Comma-separated method names");
  benchmark->add_option("--workers", bench.workers, "Worker threads");
  benchmark->add_option("--base-seed", bench.base_seed, "Base seed");
  benchmark->add_option("--out", bench.out, "Output directory");

  ServeFlags serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the HTTP elicitation service");
  serve_cmd->add_option("--host", serve.host, "Bind address")->envname("BATCHPREF_BIND");
  serve_cmd->add_option("--port", serve.port, "Port (0 = any free port)")->envname("BATCHPREF_PORT")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--data-dir", serve.data_dir, "Session and dataset directory")->envname("BATCHPREF_DATA_DIR");
  serve_cmd->add_option("--env", serve.env, "Default environment")->envname("BATCHPREF_DEFAULT_ENV");
  serve_cmd->add_option("--K", serve.dataset_size, "Dataset size per environment")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--dataset-seed", serve.dataset_seed, "Dataset seed");
  serve_cmd->add_option("--static-dir", serve.static_dir, "Directory served at /");

  CLI::App* envs = app.add_subcommand("envs", "List environments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage", e.what(), kExitUsage);
  }

  if (generate->parsed()) return Generate(gen_env, gen_count, gen_seed, gen_out, gen_force, gen_raw);
  if (benchmark->parsed()) return Benchmark(bench);
  if (serve_cmd->parsed()) return Serve(serve);
  if (envs->parsed()) {
    TakeString json;
    const bp_status status = bp_envs_json(&json.p);
    if (status != BP_OK) return ReportStatus(status);
    std::cout << json.p << "\n";
    return kExitOk;
  }
  return kExitUsage;
}
