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
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "envs/dataset.hpp"

namespace batchpref {
namespace {

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes little-endian");

constexpr char kMagic[4] = {'B', 'P', 'Q', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void WritePod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  Require(static_cast<bool>(in), ErrorCode::kIo, "truncated dataset file");
  return v;
}

std::vector<double> ToStd(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void SaveDataset(const QueryDataset& ds, const std::string& path, bool overwrite) {
  namespace fs = std::filesystem;
  Require(overwrite || !fs::exists(path), ErrorCode::kIo,
          "refusing to overwrite existing file '" + path + "'");
  nlohmann::json header = {
      {"format", "batchpref-dataset"},
      {"env_id", ds.env_id},
      {"K", ds.size()},
      {"d", ds.feature_dim},
      {"T", ds.horizon},
      {"dim_x", ds.dim_x},
      {"dim_u", ds.dim_u},
      {"seed", ds.seed},
      {"standardized", ds.feature_stats.standardized},
      {"feature_mean", ToStd(ds.feature_stats.mean)},
      {"feature_scale", ToStd(ds.feature_stats.scale)},
  };
  const std::string text = header.dump();

  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require(static_cast<bool>(out), ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(kMagic, 4);
    WritePod(out, kVersion);
    WritePod(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    // Records hold the features the learner sees; the header carries the
    // transform back to raw units.
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      out.write(reinterpret_cast<const char*>(ds.initial_state.data()),
                static_cast<std::streamsize>(sizeof(double) * ds.dim_x));
      out.write(reinterpret_cast<const char*>(ds.actions_a.row(r).data()),
                static_cast<std::streamsize>(sizeof(double) * ds.actions_a.cols()));
      out.write(reinterpret_cast<const char*>(ds.actions_b.row(r).data()),
                static_cast<std::streamsize>(sizeof(double) * ds.actions_b.cols()));
      out.write(reinterpret_cast<const char*>(ds.features_a.row(r).data()),
                static_cast<std::streamsize>(sizeof(double) * ds.feature_dim));
      out.write(reinterpret_cast<const char*>(ds.features_b.row(r).data()),
                static_cast<std::streamsize>(sizeof(double) * ds.feature_dim));
    }
    Require(static_cast<bool>(out), ErrorCode::kIo, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  Require(!ec, ErrorCode::kIo, "cannot move dataset into place: " + ec.message());
}

QueryDataset LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open dataset '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  Require(in && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::kIo, "not a batchpref dataset");
  const auto version = ReadPod<std::uint32_t>(in);
  Require(version == kVersion, ErrorCode::kIo, "unsupported dataset version");
  const auto hlen = ReadPod<std::uint64_t>(in);
  Require(hlen < (1u << 24), ErrorCode::kIo, "corrupt dataset header length");
  std::string text(hlen, '\0');
  in.read(text.data(), static_cast<std::streamsize>(hlen));
  Require(static_cast<bool>(in), ErrorCode::kIo, "truncated dataset header");

  nlohmann::json h;
  try {
    h = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kIo, std::string("corrupt dataset header: ") + e.what());
  }
  QueryDataset ds;
  ds.env_id = h.at("env_id").get<std::string>();
  const auto count = h.at("K").get<std::size_t>();
  ds.feature_dim = h.at("d").get<std::size_t>();
  ds.horizon = h.at("T").get<std::size_t>();
  ds.dim_x = h.at("dim_x").get<std::size_t>();
  ds.dim_u = h.at("dim_u").get<std::size_t>();
  ds.seed = h.at("seed").get<std::uint64_t>();
  ds.feature_stats.standardized = h.at("standardized").get<bool>();
  const auto mean = h.at("feature_mean").get<std::vector<double>>();
  const auto scale = h.at("feature_scale").get<std::vector<double>>();
  ds.feature_stats.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  ds.feature_stats.scale = Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));

  const auto k = static_cast<Eigen::Index>(count);
  const auto width = static_cast<Eigen::Index>(ds.horizon * ds.dim_u);
  const auto d = static_cast<Eigen::Index>(ds.feature_dim);
  ds.initial_state.resize(static_cast<Eigen::Index>(ds.dim_x));
  ds.actions_a.resize(k, width);
  ds.actions_b.resize(k, width);
  ds.features_a.resize(k, d);
  ds.features_b.resize(k, d);
  auto read_into = [&](double* dst, Eigen::Index n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(sizeof(double) * n));
    Require(static_cast<bool>(in), ErrorCode::kIo, "truncated dataset records");
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    read_into(ds.initial_state.data(), ds.initial_state.size());
    read_into(ds.actions_a.row(i).data(), width);
    read_into(ds.actions_b.row(i).data(), width);
    read_into(ds.features_a.row(i).data(), d);
    read_into(ds.features_b.row(i).data(), d);
  }
  ds.RefreshPsi();
  return ds;
}

}  // namespace batchpref
