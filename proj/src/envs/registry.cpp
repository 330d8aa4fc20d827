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
#include "envs/environment.hpp"

namespace batchpref {

std::vector<EnvInfo> ListEnvironments() {
  return {
      {"driver", "2D point car among three lanes with a scripted second car; T=5, dim_u=2, d=4"},
      {"linear_synth", "stable random linear system, quadratic-form features; T=5, dim_u=2, d=4"},
  };
}

std::unique_ptr<Environment> MakeEnvironment(const std::string& id) {
  if (id == "driver") return MakeDriverEnv();
  if (id == "linear_synth") return MakeLinearSynthEnv(4, 0);
  Fail(ErrorCode::kNotFound, "unknown environment '" + id + "'");
}

}  // namespace batchpref
