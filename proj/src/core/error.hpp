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

#ifndef BATCHPREF_CORE_ERROR_HPP_
#define BATCHPREF_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace batchpref {

// Error categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  kInvalidInput = 1,
  kConfiguration = 2,
  kState = 3,
  kNumerical = 4,
  kNotFound = 5,
  kIo = 6,
  kDegenerateKernel = 7,
  kInsufficientData = 8,
  kConflict = 9,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace batchpref

#endif  // BATCHPREF_CORE_ERROR_HPP_
