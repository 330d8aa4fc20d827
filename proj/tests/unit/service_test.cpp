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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "service/service.hpp"
#include "test_util.hpp"

namespace batchpref {
namespace {

using testing::CodeOf;
using nlohmann::json;

ServiceOptions TestOptions(const std::string& name) {
  ServiceOptions o;
  o.data_dir = (std::filesystem::temp_directory_path() / ("batchpref_service_" + name)).string();
  std::filesystem::remove_all(o.data_dir);
  o.dataset_size = 3000;
  o.dataset_seed = 4;
  return o;
}

json Call(Service& s, const std::string& method, const std::string& path, const json& body, int expected) {
  const HttpResponse r = s.Handle(method, path, body.is_null() ? "" : body.dump());
  INFO(method << " " << path << " -> " << r.body);
  CHECK(r.status == expected);
  return json::parse(r.body);
}

std::string CreateSession(Service& s, std::size_t k = 3) {
  const json created = Call(s, "POST", "/sessions",
                            {{"env", "driver"}, {"k", k}, {"N", 20}, {"M", 100}, {"seed", 11}, {"w_true", {0.5, -0.5, 0.5, -0.5}}}, 201);
  return created["session_id"];
}

json Answers(const json& batch, std::size_t count, int choice = 1) {
  json responses = json::array();
  for (std::size_t i = 0; i < count; ++i) responses.push_back({{"query_id", batch["queries"][i]["query_id"]}, {"choice", choice}});
  return {{"responses", responses}};
}

TEST_SUITE("service") {

TEST_CASE("error codes map to HTTP statuses") {
  CHECK(HttpStatusFor(ErrorCode::kNotFound) == 404);
  CHECK(HttpStatusFor(ErrorCode::kInvalidInput) == 400);
  CHECK(HttpStatusFor(ErrorCode::kConfiguration) == 400);
  CHECK(HttpStatusFor(ErrorCode::kConflict) == 409);
  CHECK(HttpStatusFor(ErrorCode::kState) == 409);
  CHECK(HttpStatusFor(ErrorCode::kIo) == 500);
}

TEST_CASE("environment listing") {
  Service s(TestOptions("envs"));
  const json envs = Call(s, "GET", "/envs", nullptr, 200);
  REQUIRE(envs["envs"].size() >= 2);
  CHECK(envs["envs"][0]["id"] == "driver");
  CHECK(envs["envs"][0]["default"] == true);
  Call(s, "POST", "/envs", nullptr, 405);
  Call(s, "GET", "/nowhere", nullptr, 404);
}

TEST_CASE("session creation validates its input") {
  Service s(TestOptions("create"));
  Call(s, "POST", "/sessions", {{"env", "driver"}, {"k", 30}, {"N", 20}}, 400);
  Call(s, "POST", "/sessions", {{"env", "mars"}}, 404);
  Call(s, "POST", "/sessions", {{"colour", "red"}}, 400);
  Call(s, "POST", "/sessions", {{"method", "oracle"}}, 400);
  const HttpResponse bad = s.Handle("POST", "/sessions", "{not json");
  CHECK(bad.status == 400);
  CHECK(json::parse(bad.body)["error"]["code"] == "invalid_input");
  Call(s, "GET", "/sessions/nope/batch", nullptr, 404);
}

TEST_CASE("batch is stable until answered and answers commit together") {
  Service s(TestOptions("flow"));
  const std::string id = CreateSession(s);
  const json summary0 = Call(s, "GET", "/sessions/" + id + "/summary", nullptr, 200);
  CHECK(summary0["answered_count"] == 0);
  CHECK(summary0["pending_batch"] == false);
  for (const auto& q : summary0["quantiles"]) CHECK(q["q90"].get<double>() - q["q10"].get<double>() > 0.5);

  const json batch = Call(s, "GET", "/sessions/" + id + "/batch", nullptr, 200);
  REQUIRE(batch["queries"].size() == 3);
  CHECK(batch["batch_number"] == 0);
  CHECK(batch["queries"][0]["trajectory_a"]["states"].size() == 6);
  CHECK(batch["queries"][0]["psi"].size() == 4);
  CHECK(Call(s, "GET", "/sessions/" + id + "/batch", nullptr, 200) == batch);

  json partial = Answers(batch, 1);
  const json ack1 = Call(s, "POST", "/sessions/" + id + "/responses", partial, 200);
  CHECK(ack1["committed"] == false);
  CHECK(ack1["buffered"] == 1);
  Call(s, "POST", "/sessions/" + id + "/responses", partial, 409);

  json dup = {{"responses", {{{"query_id", batch["queries"][1]["query_id"]}, {"choice", 1}},
                             {{"query_id", batch["queries"][1]["query_id"]}, {"choice", -1}}}}};
  Call(s, "POST", "/sessions/" + id + "/responses", dup, 400);
  Call(s, "POST", "/sessions/" + id + "/responses", {{"responses", {{{"query_id", 999999}, {"choice", 1}}}}}, 400);
  Call(s, "POST", "/sessions/" + id + "/responses",
       {{"responses", {{{"query_id", batch["queries"][1]["query_id"]}, {"choice", 0}}}}}, 400);
  Call(s, "GET", "/sessions/" + id + "/responses", nullptr, 405);

  json rest = {{"responses", {{{"query_id", batch["queries"][1]["query_id"]}, {"choice", -1}},
                              {{"query_id", batch["queries"][2]["query_id"]}, {"choice", 1}}}}};
  const json ack2 = Call(s, "POST", "/sessions/" + id + "/responses", rest, 200);
  CHECK(ack2["committed"] == true);
  CHECK(ack2["answered_count"] == 3);

  Call(s, "POST", "/sessions/" + id + "/responses", partial, 409);
  const json summary = Call(s, "GET", "/sessions/" + id + "/summary", nullptr, 200);
  CHECK(summary["answered_count"] == 3);
  CHECK(summary["batches_completed"] == 1);
  CHECK(summary["alignment"].is_number());
  const json next = Call(s, "GET", "/sessions/" + id + "/batch", nullptr, 200);
  CHECK(next["batch_number"] == 1);
}

TEST_CASE("a full batch in one payload is accepted") {
  Service s(TestOptions("full"));
  const std::string id = CreateSession(s, 5);
  const json batch = Call(s, "GET", "/sessions/" + id + "/batch", nullptr, 200);
  const json ack = Call(s, "POST", "/sessions/" + id + "/responses", Answers(batch, 5, -1), 200);
  CHECK(ack["accepted"] == 5);
  CHECK(ack["committed"] == true);
  CHECK(Call(s, "GET", "/sessions/" + id + "/summary", nullptr, 200)["pending_batch"] == false);
}

TEST_CASE("a restarted service replays the log and reissues the same batch") {
  const ServiceOptions options = TestOptions("restart");
  std::string id;
  json pending;
  {
    Service s(options);
    id = CreateSession(s);
    const json b0 = Call(s, "GET", "/sessions/" + id + "/batch", nullptr, 200);
    Call(s, "POST", "/sessions/" + id + "/responses", Answers(b0, 3), 200);
    pending = Call(s, "GET", "/sessions/" + id + "/batch", nullptr, 200);
    Call(s, "POST", "/sessions/" + id + "/responses", Answers(pending, 1, -1), 200);
  }
  // Torn final line as after a crash mid-append.
  const auto log = std::filesystem::path(options.data_dir) / "sessions" / id / "events.jsonl";
  {
    std::ofstream out(log, std::ios::app);
    out << "{\"type\":\"answ";
  }
  Service restarted(options);
  const json again = Call(restarted, "GET", "/sessions/" + id + "/batch", nullptr, 200);
  REQUIRE(again["queries"].size() == 3);
  CHECK(again["batch_number"] == pending["batch_number"]);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again["queries"][i]["query_id"] == pending["queries"][i]["query_id"]);
    CHECK(again["queries"][i]["psi"] == pending["queries"][i]["psi"]);
    CHECK(again["queries"][i]["answered"] == (i == 0));
  }
  const json summary = Call(restarted, "GET", "/sessions/" + id + "/summary", nullptr, 200);
  CHECK(summary["restored_batch_matches"] == true);
  CHECK(summary["answered_count"] == 3);
  CHECK(summary["buffered_answers"] == 1);
  // The buffered answer survived, so only the remaining two are needed.
  json rest = {{"responses", {{{"query_id", pending["queries"][1]["query_id"]}, {"choice", 1}},
                              {{"query_id", pending["queries"][2]["query_id"]}, {"choice", 1}}}}};
  CHECK(Call(restarted, "POST", "/sessions/" + id + "/responses", rest, 200)["committed"] == true);
}

TEST_CASE("event log drops only a torn tail") {
  const auto dir = std::filesystem::temp_directory_path() / "batchpref_eventlog";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "events.jsonl";
  {
    EventLog log(path);
    log.Append({{"n", 1}});
    log.Append({{"n", 2}});
    CHECK(log.count() == 2);
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "{\"n\":";
  }
  const auto events = EventLog::ReadAll(path);
  REQUIRE(events.size() == 2);
  CHECK(events[1]["n"] == 2);
  {
    std::ofstream out(path, std::ios::trunc);
    out << "{\"n\":1}\ngarbage\n{\"n\":3}\n";
  }
  CHECK(CodeOf([&] { EventLog::ReadAll(path); }) == ErrorCode::kIo);
}

TEST_CASE("session params round-trip through JSON") {
  SessionParams p;
  p.env_id = "linear_synth";
  p.k = 4;
  p.seed = 77;
  p.w_true = Vector::Ones(4) * 0.5;
  const SessionParams back = SessionParams::FromJson(p.ToJson());
  CHECK(back.env_id == "linear_synth");
  CHECK(back.k == 4);
  CHECK(back.seed == 77);
  REQUIRE(back.w_true.has_value());
  CHECK(*back.w_true == *p.w_true);
}

TEST_CASE("dataset cache reuses the file on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "batchpref_dscache";
  std::filesystem::remove_all(dir);
  DatasetCache a(dir);
  const auto first = a.Get("driver", 500, 2);
  CHECK(std::filesystem::exists(dir / "driver_K500_seed2.bpqd"));
  DatasetCache b(dir);
  CHECK(b.Get("driver", 500, 2)->psi == first->psi);
  CHECK(a.Get("driver", 500, 2).get() == first.get());
}

}  // TEST_SUITE

}  // namespace
}  // namespace batchpref
