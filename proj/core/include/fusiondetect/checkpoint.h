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

#ifndef FUSIONDETECT_CHECKPOINT_H_
#define FUSIONDETECT_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "fusiondetect/mlp.h"

namespace fusiondetect::head {

inline constexpr uint16_t kCheckpointVersion = 1;

// Layout, little-endian:
//   "FDHEAD" | u16 version | u32 input_dim | u32 n_hidden | u32 widths[n_hidden]
//   | u8 activation | per layer: f32 weight[out*in], f32 bias[out]
std::vector<char> serialize_checkpoint(const MlpParams& params);

// kCorruptCheckpoint on bad magic or size; kVersionMismatch on an unknown
// version or when the declared input dim differs from expected_input_dim.
MlpParams deserialize_checkpoint(std::span<const char> bytes,
                                 std::optional<int> expected_input_dim = std::nullopt);

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params);
MlpParams load_checkpoint(const std::filesystem::path& path,
                          std::optional<int> expected_input_dim = std::nullopt);

}  // namespace fusiondetect::head

#endif  // FUSIONDETECT_CHECKPOINT_H_
