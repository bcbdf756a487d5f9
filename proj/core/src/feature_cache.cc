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

#include "fusiondetect/feature_cache.h"

#include <atomic>
#include <cmath>
#include <mutex>

#include "binary_io.h"
#include "file_util.h"
#include "fusiondetect/error.h"
#include "fusiondetect/parallel.h"
#include "fusiondetect/rng.h"

namespace fusiondetect::datasets {
namespace {

constexpr std::string_view kMagic = "FDCACHE";

bool is_image_error(ErrorCode code) {
  return code == ErrorCode::kFileNotFound || code == ErrorCode::kIoError ||
         code == ErrorCode::kDecodeError;
}

}  // namespace

void FeatureCache::validate() const {
  if (features.rows() != labels.size() || indices.size() != labels.size()) {
    fail(ErrorCode::kShapeMismatch, "feature cache rows, labels and indices disagree");
  }
  if (!labels.empty() && features.dim == 0) {
    fail(ErrorCode::kShapeMismatch, "feature cache has rows but zero dim");
  }
}

std::vector<char> serialize_feature_cache(const FeatureCache& cache) {
  cache.validate();
  internal::ByteWriter w;
  w.bytes(kMagic);
  w.scalar<uint16_t>(kFeatureCacheVersion);
  w.scalar<uint64_t>(cache.backbone_hash);
  w.scalar<uint32_t>(static_cast<uint32_t>(cache.features.dim));
  w.scalar<uint64_t>(cache.size());
  for (size_t i = 0; i < cache.size(); ++i) {
    w.scalar<uint64_t>(cache.indices[i]);
    w.scalar<uint8_t>(static_cast<uint8_t>(label_value(cache.labels[i])));
    w.array(cache.features.row(i));
  }
  return w.data();
}

FeatureCache deserialize_feature_cache(std::span<const char> bytes,
                                       std::optional<uint64_t> expected_hash) {
  internal::ByteReader r(bytes);
  if (!r.expect(kMagic)) {
    if (bytes.size() < kMagic.size()) fail(ErrorCode::kTruncatedCache, "file shorter than header");
    fail(ErrorCode::kParseError, "not a feature cache (bad magic)");
  }
  const auto version = r.scalar<uint16_t>();
  const auto hash = r.scalar<uint64_t>();
  const auto dim = r.scalar<uint32_t>();
  const auto count = r.scalar<uint64_t>();
  if (!r.ok()) fail(ErrorCode::kTruncatedCache, "truncated header");
  if (version != kFeatureCacheVersion) {
    fail(ErrorCode::kVersionMismatch, "feature cache version " + std::to_string(version) +
                                          ", expected " +
                                          std::to_string(kFeatureCacheVersion));
  }
  if (expected_hash && *expected_hash != hash) {
    fail(ErrorCode::kHashMismatch,
         "cache was built with a different backbone set (hash " + std::to_string(hash) +
             ", requested " + std::to_string(*expected_hash) + ")");
  }
  const size_t row_bytes = 8 + 1 + static_cast<size_t>(dim) * sizeof(float);
  if (count > 0 && dim == 0) fail(ErrorCode::kParseError, "cache declares rows of dim 0");
  if (r.remaining() / row_bytes < count || r.remaining() != count * row_bytes) {
    fail(ErrorCode::kTruncatedCache,
         "header declares " + std::to_string(count) + " rows (" +
             std::to_string(count * row_bytes) + " bytes) but payload is " +
             std::to_string(r.remaining()) + " bytes");
  }

  FeatureCache cache;
  cache.backbone_hash = hash;
  cache.features = head::FeatureMatrix(dim);
  cache.features.values.resize(static_cast<size_t>(count) * dim);
  cache.labels.reserve(count);
  cache.indices.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    cache.indices.push_back(r.scalar<uint64_t>());
    const auto label = r.scalar<uint8_t>();
    if (label > 1) fail(ErrorCode::kParseError, "row " + std::to_string(i) + ": bad label byte");
    cache.labels.push_back(static_cast<Label>(label));
    r.array(std::span<float>(cache.features.values).subspan(i * dim, dim));
  }
  return cache;
}

void write_feature_cache(const std::filesystem::path& path, const FeatureCache& cache) {
  internal::write_file_atomic(path, serialize_feature_cache(cache));
}

FeatureCache read_feature_cache(const std::filesystem::path& path,
                                std::optional<uint64_t> expected_hash) {
  const std::vector<char> bytes = internal::read_file(path);
  try {
    return deserialize_feature_cache(bytes, expected_hash);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.message());
  }
}

ExtractResult extract_features(const Manifest& manifest, const head::FeaturePipeline& pipeline,
                               const ExtractOptions& options, const ProgressCallback& progress) {
  options.perturbation.validate();
  options.augment.validate();
  const size_t n = manifest.entries.size();
  std::vector<std::optional<head::FusedFeature>> rows(n);
  std::vector<std::string> errors(n);
  std::atomic<size_t> done{0};
  std::mutex progress_mutex;

  parallel_for(n, [&](size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    imaging::RawImage img;
    try {
      img = imaging::load_image(manifest.resolve(entry));
    } catch (const Error& e) {
      if (!is_image_error(e.code())) throw;
      errors[i] = e.message();
    }
    if (errors[i].empty()) {
      img = imaging::apply_perturbation(img, options.perturbation);
      if (entry.split == Split::kTrain && options.augment.probability > 0.0) {
        Rng rng(derive_seed(options.seed, i));
        img = imaging::train_augment(img, rng, options.augment);
      }
      rows[i] = pipeline.extract(img);
    }
    const size_t finished = ++done;
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(finished, n);
    }
  });

  ExtractResult result;
  result.cache.backbone_hash = pipeline.hash();
  result.cache.features = head::FeatureMatrix(pipeline.dim());
  for (size_t i = 0; i < n; ++i) {
    if (!rows[i]) {
      result.skipped.push_back({i, manifest.entries[i].path, errors[i]});
      continue;
    }
    result.cache.features.append(rows[i]->values);
    result.cache.labels.push_back(manifest.entries[i].label);
    result.cache.indices.push_back(i);
  }
  return result;
}

}  // namespace fusiondetect::datasets
