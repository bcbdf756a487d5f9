/*
 * Copyright 2026 The FusionDetect Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fusiondetect/error.h"

namespace fusiondetect {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kEncodeError: return "EncodeError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kGraphExecution: return "GraphExecutionError";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kDivergence: return "DivergenceDetected";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::kDegenerateClasses: return "DegenerateClasses";
    case ErrorCode::kSplitViolation: return "SplitViolation";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kInsufficientImages: return "InsufficientImages";
    case ErrorCode::kHashMismatch: return "HashMismatch";
    case ErrorCode::kTruncatedCache: return "TruncatedCache";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kEmptyPool: return "EmptyPool";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kFileNotFound:
    case ErrorCode::kParseError:
    case ErrorCode::kInvariantViolation:
    case ErrorCode::kSplitViolation:
    case ErrorCode::kInsufficientImages:
    case ErrorCode::kEmptyClass:
    case ErrorCode::kEmptyPool:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code),
      message_(message) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fusiondetect
