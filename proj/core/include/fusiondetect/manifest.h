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

#ifndef FUSIONDETECT_MANIFEST_H_
#define FUSIONDETECT_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fusiondetect/label.h"

namespace fusiondetect::datasets {

enum class Split : uint8_t { kTrain, kTest };

std::string split_name(Split split);

// One image of the two-axis data model: which generator produced it (or
// "real") and which source dataset / visual domain it belongs to.
struct ManifestEntry {
  std::string path;
  Label label = Label::kReal;
  std::string generator_id;
  std::string dataset_id;
  Split split = Split::kTest;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Entries plus the directory relative paths are resolved against.
struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& entry) const;

  // Fake generator ids in first-seen order.
  std::vector<std::string> generators() const;
};

// JSON Lines, one object per line with keys path, label ("real"/"fake"),
// generator_id, dataset_id, split ("train"/"test"). Blank lines are skipped;
// unknown keys are ignored. Throws kParseError(line) on malformed rows and
// kInvariantViolation(line) on rows breaking an entry invariant or repeating
// a (dataset_id, path) pair.
std::vector<ManifestEntry> parse_manifest(std::istream& in, const std::string& source);
Manifest load_manifest(const std::filesystem::path& path);

std::string to_json_line(const ManifestEntry& entry);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

std::vector<ManifestEntry> filter_split(const std::vector<ManifestEntry>& entries,
                                        Split split);

struct SamplingSpec {
  int per_generator_count = 1;
  bool balance_real_fake = true;
  uint64_t seed = 0;

  void validate() const;
};

// Seeded sampling without replacement: per_generator_count entries of every
// fake generator and, when balancing, as many reals as fakes in total (all
// reals otherwise). Output keeps manifest order. Throws kInsufficientImages
// naming every generator that falls short.
std::vector<ManifestEntry> balanced_sample(const std::vector<ManifestEntry>& entries,
                                           const SamplingSpec& spec);

}  // namespace fusiondetect::datasets

#endif  // FUSIONDETECT_MANIFEST_H_
