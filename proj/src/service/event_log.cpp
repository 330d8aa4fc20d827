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

#include <unistd.h>

#include <fstream>
#include <iterator>

#include "service/service.hpp"

namespace batchpref {

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    // Cut an unterminated tail left by a crash so new events start on a fresh line.
    std::ifstream in(path_, std::ios::binary);
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t keep = data.find_last_of('\n') == std::string::npos ? 0 : data.find_last_of('\n') + 1;
    if (keep != data.size()) std::filesystem::resize_file(path_, keep);
    count_ = ReadAll(path_).size();
  }
  file_ = std::fopen(path_.c_str(), "ab");
  Require(file_ != nullptr, ErrorCode::kIo, "cannot open event log '" + path_.string() + "'");
}

EventLog::~EventLog() {
  if (file_ != nullptr) std::fclose(file_);
}

void EventLog::Append(const nlohmann::json& event) {
  const std::string line = event.dump() + "\n";
  const bool ok = std::fwrite(line.data(), 1, line.size(), file_) == line.size() &&
                  std::fflush(file_) == 0 && ::fsync(::fileno(file_)) == 0;
  Require(ok, ErrorCode::kIo, "cannot append to event log '" + path_.string() + "'");
  ++count_;
}

std::vector<nlohmann::json> EventLog::ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot read event log '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  bool last_terminated = true;
  while (std::getline(in, line)) {
    lines.push_back(line);
    last_terminated = !in.eof();
  }
  // An unterminated last line was never acknowledged.
  if (!lines.empty() && !last_terminated) lines.pop_back();
  std::vector<nlohmann::json> events;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      events.push_back(nlohmann::json::parse(lines[i]));
    } catch (const nlohmann::json::exception&) {
      Fail(ErrorCode::kIo, "corrupt event log '" + path.string() + "' at line " + std::to_string(i + 1));
    }
  }
  return events;
}

}  // namespace batchpref
