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

#ifndef FUSIONDETECT_LABEL_H_
#define FUSIONDETECT_LABEL_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace fusiondetect {

// Fake is the positive class throughout.
enum class Label : uint8_t { kReal = 0, kFake = 1 };

inline constexpr std::string_view kRealGeneratorId = "real";

inline std::string_view label_name(Label label) {
  return label == Label::kFake ? "fake" : "real";
}

inline int label_value(Label label) { return static_cast<int>(label); }

}  // namespace fusiondetect

#endif  // FUSIONDETECT_LABEL_H_
