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

#ifndef FUSIONDETECT_FEATURE_CACHE_H_
#define FUSIONDETECT_FEATURE_CACHE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fusiondetect/feature_pipeline.h"
#include "fusiondetect/fusion.h"
#include "fusiondetect/imaging.h"
#include "fusiondetect/label.h"
#include "fusiondetect/manifest.h"

namespace fusiondetect::datasets {

inline constexpr uint16_t kFeatureCacheVersion = 1;

// Fused features keyed by the producing feature pipeline.
struct FeatureCache {
  uint64_t backbone_hash = 0;
  head::FeatureMatrix features;
  std::vector<Label> labels;
  // Manifest row each feature came from.
  std::vector<uint64_t> indices;

  size_t size() const { return labels.size(); }
  void validate() const;
};

// Layout: "FDCACHE" | u16 version | u64 backbone hash | u32 dim | u64 count,
// then count rows of u64 index | u8 label | dim f32. Little-endian.
std::vector<char> serialize_feature_cache(const FeatureCache& cache);

// kTruncatedCache when the byte count disagrees with the header,
// kHashMismatch when expected_hash is given and differs.
FeatureCache deserialize_feature_cache(std::span<const char> bytes,
                                       std::optional<uint64_t> expected_hash = std::nullopt);

void write_feature_cache(const std::filesystem::path& path, const FeatureCache& cache);
FeatureCache read_feature_cache(const std::filesystem::path& path,
                                std::optional<uint64_t> expected_hash = std::nullopt);

struct SkippedImage {
  uint64_t index = 0;
  std::string path;
  std::string reason;
};

struct ExtractOptions {
  // Applied to every image before preprocessing.
  imaging::PerturbSpec perturbation;
  // Train-split images are augmented with augment.probability using a
  // stream derived from (seed, manifest index). Zero disables.
  imaging::AugmentConfig augment{.probability = 0.0};
  uint64_t seed = 0;
};

struct ExtractResult {
  FeatureCache cache;
  std::vector<SkippedImage> skipped;
};

using ProgressCallback = std::function<void(size_t done, size_t total)>;

// Runs every manifest row through the pipeline. Rows whose image cannot be
// read or decoded are skipped and reported; other errors propagate. Rows
// are emitted in manifest order regardless of thread count.
ExtractResult extract_features(const Manifest& manifest, const head::FeaturePipeline& pipeline,
                               const ExtractOptions& options = {},
                               const ProgressCallback& progress = {});

}  // namespace fusiondetect::datasets

#endif  // FUSIONDETECT_FEATURE_CACHE_H_
