// Copyright 2026 The gnrimpute Authors
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

#ifndef GNR_ERROR_HPP
#define GNR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace gnr {

enum class ErrorCode {
  invalid_argument,
  dimension,
  domain,
  numeric,
  parse,
  consistency,
  degenerate_feature,
  undefined_metric,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// The single exception type thrown by the library. The code identifies the
/// failure class; the message carries location or component detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const char* what) {
  if (!condition) throw Error(code, what);
}

}  // namespace gnr

#endif  // GNR_ERROR_HPP
