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

#ifndef BATCHPREF_CORE_TYPES_HPP_
#define BATCHPREF_CORE_TYPES_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace batchpref {

using Vector = Eigen::VectorXd;
// Row-major so that each sample / psi row is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using IndexList = std::vector<std::size_t>;

}  // namespace batchpref

#endif  // BATCHPREF_CORE_TYPES_HPP_
