/*
Copyright 2026 The sylkit Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace sylkit {

enum class ErrorCode {
  kUnreadableFile,
  kUnsupportedEncoding,
  kEmptyAudio,
  kParseError,
  kTierNotFound,
  kPointTier,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kNonFinite,
  kInvalidArgument,
  kTimeBaseMismatch,
  kIncompatibleSpec,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnreadableFile: return "unreadable file";
    case ErrorCode::kUnsupportedEncoding: return "unsupported encoding";
    case ErrorCode::kEmptyAudio: return "empty audio";
    case ErrorCode::kParseError: return "parse error";
    case ErrorCode::kTierNotFound: return "tier not found";
    case ErrorCode::kPointTier: return "point tier";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kTruncated: return "truncated payload";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kTimeBaseMismatch: return "time base mismatch";
    case ErrorCode::kIncompatibleSpec: return "incompatible pipeline";
  }
  return "unknown error";
}

// All library failures are reported with this exception; code() lets callers
// branch on the failure kind without parsing the message.
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

}  // namespace sylkit
