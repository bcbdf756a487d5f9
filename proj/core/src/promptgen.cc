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

#include "fusiondetect/promptgen.h"

#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "file_util.h"
#include "fusiondetect/error.h"
#include "fusiondetect/manifest.h"
#include "json.hpp"

namespace fusiondetect::promptgen {
namespace {

size_t slot_index(std::string_view name) {
  for (size_t k = 0; k < kSlotCount; ++k) {
    if (kSlotNames[k] == name) return k;
  }
  fail(ErrorCode::kInvalidArgument, "unknown prompt slot '" + std::string(name) + "'");
}

}  // namespace

std::vector<std::string>& PromptPools::slot(std::string_view name) {
  return slots[slot_index(name)];
}

const std::vector<std::string>& PromptPools::slot(std::string_view name) const {
  return slots[slot_index(name)];
}

void PromptPools::validate() const {
  for (size_t k = 0; k < kSlotCount; ++k) {
    if (slots[k].empty()) fail(ErrorCode::kEmptyPool, "pool '" + std::string(kSlotNames[k]) + "' is empty");
    for (const auto& entry : slots[k]) {
      if (internal::trim(entry).empty()) {
        fail(ErrorCode::kInvalidArgument, "pool '" + std::string(kSlotNames[k]) + "' has a blank entry");
      }
    }
  }
}

uint64_t PromptPools::combination_count() const {
  uint64_t total = 1;
  for (const auto& pool : slots) {
    const uint64_t size = pool.size();
    if (size != 0 && total > std::numeric_limits<uint64_t>::max() / size) {
      return std::numeric_limits<uint64_t>::max();
    }
    total *= size;
  }
  return total;
}

std::vector<std::string> parse_pool(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string entry = internal::trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    out.push_back(entry);
  }
  return out;
}

PromptPools load_pools(const std::filesystem::path& dir) {
  PromptPools pools;
  for (size_t k = 0; k < kSlotCount; ++k) {
    const auto path = dir / (std::string(kSlotNames[k]) + ".txt");
    std::istringstream in(internal::read_text_file(path));
    pools.slots[k] = parse_pool(in);
    if (pools.slots[k].empty()) {
      fail(ErrorCode::kEmptyPool, path.string() + ": pool '" + std::string(kSlotNames[k]) +
                                      "' has no entries");
    }
  }
  return pools;
}

std::string render_template(const SlotChoices& choices) {
  // Slots occur in kSlotNames order; resuming after each substitution keeps
  // braces inside pool entries literal.
  std::string out(kPromptTemplate);
  size_t cursor = 0;
  for (size_t k = 0; k < kSlotCount; ++k) {
    const std::string token = "{" + std::string(kSlotNames[k]) + "}";
    const size_t pos = out.find(token, cursor);
    out.replace(pos, token.size(), choices[k]);
    cursor = pos + choices[k].size();
  }
  return out;
}

PromptRecord render_prompt(const PromptPools& pools, Rng& rng) {
  pools.validate();
  PromptRecord record;
  for (size_t k = 0; k < kSlotCount; ++k) {
    const auto& pool = pools.slots[k];
    record.slots[k] = pool[rng.below(pool.size())];
  }
  record.text = render_template(record.slots);
  return record;
}

PromptBatch generate_batch(const PromptPools& pools, int64_t n, uint64_t seed,
                           const std::string& target_generator) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "prompt count must be >= 1, got " + std::to_string(n));
  pools.validate();
  PromptBatch batch;
  batch.records.reserve(static_cast<size_t>(n));
  std::set<SlotChoices> used;
  for (int64_t i = 0; i < n; ++i) {
    const uint64_t id = static_cast<uint64_t>(i);
    const uint64_t record_seed = derive_seed(seed, id);
    Rng rng(record_seed);
    PromptRecord record = render_prompt(pools, rng);
    int attempts = 0;
    while (used.count(record.slots) > 0 && attempts < kMaxDedupAttempts) {
      record = render_prompt(pools, rng);
      ++attempts;
      ++batch.redraws;
    }
    if (!used.insert(record.slots).second) batch.duplicate_ids.push_back(id);
    record.id = id;
    record.seed = record_seed;
    record.target_generator = target_generator;
    batch.records.push_back(std::move(record));
  }
  return batch;
}

std::string to_json_line(const PromptRecord& record) {
  nlohmann::ordered_json slots;
  for (size_t k = 0; k < kSlotCount; ++k) slots[std::string(kSlotNames[k])] = record.slots[k];
  nlohmann::ordered_json obj = {{"id", record.id},
                                {"text", record.text},
                                {"seed", record.seed},
                                {"slots", slots},
                                {"target_generator", record.target_generator}};
  return obj.dump();
}

std::string stub_path(const PromptRecord& record) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06llu.png", static_cast<unsigned long long>(record.id));
  return record.target_generator + "/" + buf;
}

std::string manifest_stub(const PromptBatch& batch, const std::string& dataset_id) {
  std::string out;
  const std::string resolution =
      std::to_string(kStubResolution) + "x" + std::to_string(kStubResolution);
  for (const auto& record : batch.records) {
    datasets::ManifestEntry entry;
    entry.path = stub_path(record);
    entry.label = Label::kFake;
    entry.generator_id = record.target_generator;
    entry.dataset_id = dataset_id;
    entry.split = datasets::Split::kTest;
    std::string line = datasets::to_json_line(entry);
    line.pop_back();
    line += ",\"prompt_id\":" + std::to_string(record.id) + ",\"resolution\":\"" + resolution + "\"}";
    out += line + "\n";
  }
  return out;
}

}  // namespace fusiondetect::promptgen
