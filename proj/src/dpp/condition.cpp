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

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "dpp/dpp.hpp"

namespace batchpref {
namespace {

constexpr double kMinReciprocalCondition = 1e-13;

Matrix InvertOrFail(const Matrix& m, const char* what) {
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > kMinReciprocalCondition)) {
    std::ostringstream msg;
    msg << what << " is singular (condition number estimate "
        << (rcond > 0.0 ? 1.0 / rcond : INFINITY) << ")";
    Fail(ErrorCode::kNumerical, msg.str());
  }
  return lu.inverse();
}

}  // namespace

ConditionedKernel ConditionKernel(const Matrix& L, const IndexList& chosen) {
  Require(L.rows() == L.cols(), ErrorCode::kInvalidInput, "kernel must be square");
  const auto n = static_cast<std::size_t>(L.rows());
  std::vector<bool> in_b(n, false);
  for (std::size_t i : chosen) {
    Require(i < n, ErrorCode::kInvalidInput, "conditioning index out of range");
    Require(!in_b[i], ErrorCode::kInvalidInput, "duplicate conditioning index");
    in_b[i] = true;
  }
  ConditionedKernel out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_b[i]) out.remaining.push_back(i);
  }
  if (chosen.empty()) {
    out.L = L;
    return out;
  }
  if (out.remaining.empty()) {
    out.L.resize(0, 0);
    return out;
  }
  Matrix shifted = L;
  for (std::size_t i : out.remaining) shifted(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += 1.0;
  const Matrix inv = InvertOrFail(shifted, "conditioning kernel");
  const Matrix block = inv(out.remaining, out.remaining);
  const auto m = static_cast<Eigen::Index>(out.remaining.size());
  out.L = InvertOrFail(block, "conditioned block") - Matrix::Identity(m, m);
  out.L = 0.5 * (out.L + out.L.transpose()).eval();
  return out;
}

}  // namespace batchpref
