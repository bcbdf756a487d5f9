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

#ifndef FUSIONDETECT_PROMPTGEN_H_
#define FUSIONDETECT_PROMPTGEN_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fusiondetect/rng.h"

namespace fusiondetect::promptgen {

inline constexpr size_t kSlotCount = 6;
inline constexpr std::array<std::string_view, kSlotCount> kSlotNames = {
    "subject", "time", "setting", "visual", "style", "light"};

inline constexpr std::string_view kPromptTemplate =
    "A richly detailed, high-resolution and photorealistic image depicting: {subject} during "
    "the {time}. The scene includes {setting}, {visual}, and lifelike rendering. The image "
    "style resembles {style}. Use {light}.";

inline constexpr int kMaxDedupAttempts = 100;
inline constexpr int kStubResolution = 1024;

using SlotChoices = std::array<std::string, kSlotCount>;

struct PromptPools {
  // Indexed like kSlotNames.
  std::array<std::vector<std::string>, kSlotCount> slots;

  std::vector<std::string>& slot(std::string_view name);
  const std::vector<std::string>& slot(std::string_view name) const;

  // kEmptyPool naming the slot when a pool is empty; kInvalidArgument for
  // blank entries.
  void validate() const;

  // Product of pool sizes, saturating at UINT64_MAX.
  uint64_t combination_count() const;
};

// One entry per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> parse_pool(std::istream& in);

// Reads <dir>/<slot>.txt for every slot.
PromptPools load_pools(const std::filesystem::path& dir);

std::string render_template(const SlotChoices& choices);

struct PromptRecord {
  uint64_t id = 0;
  std::string text;
  uint64_t seed = 0;
  SlotChoices slots;
  std::string target_generator;
};

// Draws each slot uniformly and independently.
PromptRecord render_prompt(const PromptPools& pools, Rng& rng);

struct PromptBatch {
  std::vector<PromptRecord> records;
  // Ids accepted as duplicates after kMaxDedupAttempts redraws.
  std::vector<uint64_t> duplicate_ids;
  size_t redraws = 0;
};

// Record i draws from a stream seeded with derive_seed(seed, i); a slot
// combination already used in the batch is redrawn from the same stream.
// Throws kInvalidArgument for n < 1.
PromptBatch generate_batch(const PromptPools& pools, int64_t n, uint64_t seed,
                           const std::string& target_generator);

std::string to_json_line(const PromptRecord& record);

// Intended image path for a record, relative to the manifest stub.
std::string stub_path(const PromptRecord& record);

// Manifest-format lines (fake, test split) carrying prompt_id and the
// target resolution as extra fields.
std::string manifest_stub(const PromptBatch& batch, const std::string& dataset_id);

}  // namespace fusiondetect::promptgen

#endif  // FUSIONDETECT_PROMPTGEN_H_
