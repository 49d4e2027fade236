// Copyright (c) 2026 The msvbx Authors
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

#include "msvbx/error.hpp"

namespace msvbx {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kTruncated: return "truncated payload";
    case ErrorCode::kDimensionOverflow: return "dimension overflow";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kDegenerateInput: return "degenerate input";
    case ErrorCode::kInfeasible: return "infeasible chunk";
    case ErrorCode::kDegenerateModel: return "degenerate model";
    case ErrorCode::kConstraintViolation: return "constraint violation";
    case ErrorCode::kUndefined: return "undefined";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown";
}

}  // namespace msvbx
