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

#include <sys/socket.h>

#include <random>
#include <set>
#include <regex>
#include <thread>

// After the Eigen-based headers: httplib pulls in <resolv.h>, whose _res
// macro collides with Eigen identifiers.
#include "service/service.hpp"

#include <httplib.h>

namespace batchpref {

struct Service::Server {
  httplib::Server http;
  std::thread thread;
};

namespace {

HttpResponse JsonResponse(int status, const nlohmann::json& body) { return {status, body.dump() + "\n"}; }

HttpResponse ErrorResponse(int status, const std::string& code, const std::string& message) {
  return JsonResponse(status, {{"error", {{"code", code}, {"message", message}}}});
}

nlohmann::json ParseBody(const std::string& body) {
  if (body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidInput, std::string("request body is not valid JSON: ") + e.what());
  }
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kInvalidInput:
    case ErrorCode::kConfiguration: return 400;
    case ErrorCode::kConflict:
    case ErrorCode::kState: return 409;
    default: return 500;
  }
}

Service::Service(ServiceOptions options)
    : options_(std::move(options)),
      datasets_(std::filesystem::path(options_.data_dir) / "datasets"),
      store_(std::filesystem::path(options_.data_dir) / "sessions", datasets_) {
  MakeEnvironment(options_.default_env);
  store_.LoadAll();
}

Service::~Service() { Stop(); }

HttpResponse Service::Handle(const std::string& method, const std::string& path, const std::string& body) {
  static const std::regex kSessionRoute(R"(^/sessions/([A-Za-z0-9_-]+)/(batch|responses|summary)$)");
  try {
    if (path == "/envs") {
      if (method != "GET") return ErrorResponse(405, "method_not_allowed", "use GET");
      nlohmann::json envs = nlohmann::json::array();
      for (const EnvInfo& info : ListEnvironments()) {
        const auto env = MakeEnvironment(info.id);
        envs.push_back({{"id", info.id},
                        {"description", info.description},
                        {"feature_dim", env->feature_dim()},
                        {"horizon", env->horizon()},
                        {"dim_x", env->dim_x()},
                        {"dim_u", env->dim_u()},
                        {"default", info.id == options_.default_env}});
      }
      return JsonResponse(200, {{"envs", envs}});
    }
    if (path == "/sessions") {
      if (method != "POST") return ErrorResponse(405, "method_not_allowed", "use POST");
      nlohmann::json request = ParseBody(body);
      Require(request.is_object(), ErrorCode::kInvalidInput, "body must be a JSON object");
      for (const auto& [key, value] : request.items()) {
        static const std::set<std::string> kAllowed = {"env", "method", "k", "N", "M", "seed", "w_true"};
        Require(kAllowed.count(key) > 0, ErrorCode::kInvalidInput, "unknown field '" + key + "'");
      }
      if (!request.contains("env")) request["env"] = options_.default_env;
      if (!request.contains("seed")) request["seed"] = std::random_device{}();
      SessionParams params = SessionParams::FromJson(request);
      params.dataset_size = options_.dataset_size;
      params.dataset_seed = options_.dataset_seed;
      auto session = store_.Create(params);
      return JsonResponse(201, {{"session_id", session->id()},
                                {"env", params.env_id},
                                {"method", params.method},
                                {"k", params.k},
                                {"N", params.n},
                                {"M", params.m},
                                {"seed", params.seed}});
    }
    std::smatch match;
    if (std::regex_match(path, match, kSessionRoute)) {
      const std::string id = match[1];
      const std::string action = match[2];
      auto session = store_.Find(id);
      if (action == "batch") {
        if (method != "GET") return ErrorResponse(405, "method_not_allowed", "use GET");
        return JsonResponse(200, session->NextBatch());
      }
      if (action == "responses") {
        if (method != "POST") return ErrorResponse(405, "method_not_allowed", "use POST");
        return JsonResponse(200, session->SubmitResponses(ParseBody(body)));
      }
      if (method != "GET") return ErrorResponse(405, "method_not_allowed", "use GET");
      return JsonResponse(200, session->Summary());
    }
    return ErrorResponse(404, "not_found", "no route for " + method + " " + path);
  } catch (const Error& e) {
    return ErrorResponse(HttpStatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

void Service::Start() {
  Require(server_ == nullptr, ErrorCode::kState, "service already started");
  auto server = std::make_unique<Server>();
  httplib::Server& http = server->http;
  // Plain SO_REUSEADDR: the library default SO_REUSEPORT would let a second
  // server share an occupied port.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  if (!options_.static_dir.empty()) {
    Require(http.set_mount_point("/", options_.static_dir), ErrorCode::kIo,
            "static directory '" + options_.static_dir + "' does not exist");
  }
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse out = Handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  const std::string any = ".*";
  http.Get(any, handler);
  http.Post(any, handler);
  http.Options(any, [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  if (options_.port == 0) {
    bound_port_ = http.bind_to_any_port(options_.host);
    Require(bound_port_ > 0, ErrorCode::kIo, "cannot bind to " + options_.host);
  } else {
    Require(http.bind_to_port(options_.host, options_.port), ErrorCode::kIo,
            "cannot bind " + options_.host + ":" + std::to_string(options_.port) +
                " (port in use or not permitted)");
    bound_port_ = options_.port;
  }
  server->thread = std::thread([&http] { http.listen_after_bind(); });
  http.wait_until_ready();
  server_ = std::move(server);
}

void Service::Stop() {
  if (!server_) return;
  server_->http.stop();
  if (server_->thread.joinable()) server_->thread.join();
  server_.reset();
}

}  // namespace batchpref
