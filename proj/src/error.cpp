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

#include "gnr/error.hpp"

namespace gnr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::dimension: return "dimension mismatch";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::numeric: return "numeric error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::consistency: return "consistency error";
    case ErrorCode::degenerate_feature: return "degenerate feature";
    case ErrorCode::undefined_metric: return "undefined metric";
    case ErrorCode::io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace gnr
