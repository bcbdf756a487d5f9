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

#ifndef FUSIONDETECT_ERROR_H_
#define FUSIONDETECT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fusiondetect {

enum class ErrorCode {
  kInvalidArgument,
  kFileNotFound,
  kIoError,
  kDecodeError,
  kEncodeError,
  kShapeMismatch,
  kGraphExecution,
  kNonFinite,
  kEmptyInput,
  kEmptyClass,
  kDivergence,
  kVersionMismatch,
  kCorruptCheckpoint,
  kDegenerateClasses,
  kSplitViolation,
  kParseError,
  kInvariantViolation,
  kInsufficientImages,
  kHashMismatch,
  kTruncatedCache,
  kDegenerateInput,
  kNonFiniteGradient,
  kEmptyPool,
};

std::string_view error_code_name(ErrorCode code);

// Validation failures are caused by user input (flags, config, manifests,
// missing files);
// everything else is a runtime or data error.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  // Message without the code prefix carried by what().
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace fusiondetect

#endif  // FUSIONDETECT_ERROR_H_
