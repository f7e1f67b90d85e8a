// Copyright 2026 The qdakit Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdakit {

// Machine-readable error category. The review service maps these onto HTTP
// status codes and the CLI onto its exit status.
enum class ErrorCode {
  kIngestion,
  kConflict,
  kConfiguration,
  kValidation,
  kNotFound,
  kCorruption,
  kStale,
  kStorage,
  kUndefinedVariance,
  kDegenerateTable,
  kLookup,
  kDependency,
  kEmptyInput,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIngestion: return "ingestion_error";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kConfiguration: return "configuration_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kCorruption: return "corruption";
    case ErrorCode::kStale: return "stale";
    case ErrorCode::kStorage: return "storage_error";
    case ErrorCode::kUndefinedVariance: return "undefined_variance";
    case ErrorCode::kDegenerateTable: return "degenerate_table";
    case ErrorCode::kLookup: return "lookup_error";
    case ErrorCode::kDependency: return "dependency_error";
    case ErrorCode::kEmptyInput: return "empty_input";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Collects non-fatal notices (skipped pairs, empty selections, floors hit).
// Operations that can warn take an optional pointer; passing nullptr drops
// the notices.
class Diagnostics {
 public:
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

  const std::vector<std::string>& warnings() const { return warnings_; }
  bool empty() const { return warnings_.empty(); }
  void clear() { warnings_.clear(); }

 private:
  std::vector<std::string> warnings_;
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

}  // namespace qdakit
