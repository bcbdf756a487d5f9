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

#include "fusiondetect/checkpoint.h"

#include <string>

#include "binary_io.h"
#include "file_util.h"
#include "fusiondetect/error.h"

namespace fusiondetect::head {
namespace {

constexpr std::string_view kMagic = "FDHEAD";
// Guards against absurd allocations from a corrupt header.
constexpr uint32_t kMaxWidth = 1u << 20;

}  // namespace

std::vector<char> serialize_checkpoint(const MlpParams& params) {
  params.config.validate();
  internal::ByteWriter w;
  w.bytes(kMagic);
  w.scalar<uint16_t>(kCheckpointVersion);
  w.scalar<uint32_t>(static_cast<uint32_t>(params.config.input_dim));
  w.scalar<uint32_t>(static_cast<uint32_t>(params.config.hidden_widths.size()));
  for (int width : params.config.hidden_widths) w.scalar<uint32_t>(static_cast<uint32_t>(width));
  w.scalar<uint8_t>(static_cast<uint8_t>(params.config.activation));
  for (const auto& layer : params.layers) {
    w.array(std::span<const float>(layer.weight));
    w.array(std::span<const float>(layer.bias));
  }
  return w.data();
}

MlpParams deserialize_checkpoint(std::span<const char> bytes,
                                 std::optional<int> expected_input_dim) {
  internal::ByteReader r(bytes);
  if (!r.expect(kMagic)) fail(ErrorCode::kCorruptCheckpoint, "bad magic");
  const uint16_t version = r.scalar<uint16_t>();
  if (!r.ok()) fail(ErrorCode::kCorruptCheckpoint, "truncated header");
  if (version != kCheckpointVersion) {
    fail(ErrorCode::kVersionMismatch, "checkpoint version " + std::to_string(version) +
                                          ", expected " +
                                          std::to_string(kCheckpointVersion));
  }
  MlpConfig config;
  const uint32_t input_dim = r.scalar<uint32_t>();
  const uint32_t n_hidden = r.scalar<uint32_t>();
  if (!r.ok() || n_hidden > static_cast<uint32_t>(kMaxDepth) ||
      input_dim == 0 || input_dim > kMaxWidth) {
    fail(ErrorCode::kCorruptCheckpoint, "invalid config block");
  }
  config.input_dim = static_cast<int>(input_dim);
  for (uint32_t i = 0; i < n_hidden; ++i) {
    const uint32_t width = r.scalar<uint32_t>();
    if (width == 0 || width > kMaxWidth) {
      fail(ErrorCode::kCorruptCheckpoint, "invalid hidden width");
    }
    config.hidden_widths.push_back(static_cast<int>(width));
  }
  const uint8_t activation = r.scalar<uint8_t>();
  if (!r.ok()) fail(ErrorCode::kCorruptCheckpoint, "truncated config block");
  if (activation != static_cast<uint8_t>(Activation::kRelu)) {
    fail(ErrorCode::kVersionMismatch, "unknown activation id " + std::to_string(activation));
  }
  if (expected_input_dim && *expected_input_dim != config.input_dim) {
    fail(ErrorCode::kVersionMismatch,
         "checkpoint declares input dim " + std::to_string(config.input_dim) +
             ", features have dim " + std::to_string(*expected_input_dim));
  }
  MlpParams params = MlpParams::zeros(config);
  if (r.remaining() != params.parameter_count() * sizeof(float)) {
    fail(ErrorCode::kCorruptCheckpoint,
         "weight payload is " + std::to_string(r.remaining()) + " bytes, expected " +
             std::to_string(params.parameter_count() * sizeof(float)));
  }
  for (auto& layer : params.layers) {
    r.array(std::span<float>(layer.weight));
    r.array(std::span<float>(layer.bias));
  }
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params) {
  internal::write_file_atomic(path, serialize_checkpoint(params));
}

MlpParams load_checkpoint(const std::filesystem::path& path,
                          std::optional<int> expected_input_dim) {
  const auto bytes = internal::read_file(path);
  try {
    return deserialize_checkpoint(bytes, expected_input_dim);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace fusiondetect::head
