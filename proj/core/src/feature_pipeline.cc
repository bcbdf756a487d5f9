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

#include "fusiondetect/feature_pipeline.h"

#include <cmath>

#include "fusiondetect/error.h"
#include "fusiondetect/rng.h"

namespace fusiondetect::head {

std::string backbone_mask_name(BackboneMask mask) {
  switch (mask) {
    case BackboneMask::kSemantic: return "semantic";
    case BackboneMask::kStructural: return "structural";
    case BackboneMask::kBoth: return "both";
  }
  return "both";
}

BackboneMask parse_backbone_mask(const std::string& name) {
  if (name == "semantic") return BackboneMask::kSemantic;
  if (name == "structural") return BackboneMask::kStructural;
  if (name == "both") return BackboneMask::kBoth;
  fail(ErrorCode::kInvalidArgument, "backbone mask must be semantic, structural or both");
}

FeaturePipeline::FeaturePipeline(std::shared_ptr<const backbone::BackboneRunner> semantic,
                                 std::shared_ptr<const backbone::BackboneRunner> structural,
                                 FeatureOptions options)
    : semantic_(std::move(semantic)), structural_(std::move(structural)), options_(options) {
  const bool want_semantic = options_.mask != BackboneMask::kStructural;
  const bool want_structural = options_.mask != BackboneMask::kSemantic;
  if (want_semantic && !semantic_) {
    fail(ErrorCode::kInvalidArgument, "semantic backbone required by mask '" +
                                          backbone_mask_name(options_.mask) + "'");
  }
  if (want_structural && !structural_) {
    fail(ErrorCode::kInvalidArgument, "structural backbone required by mask '" +
                                          backbone_mask_name(options_.mask) + "'");
  }
  if (!want_semantic) semantic_.reset();
  if (!want_structural) structural_.reset();
}

std::vector<const backbone::BackboneRunner*> FeaturePipeline::runners() const {
  std::vector<const backbone::BackboneRunner*> out;
  if (semantic_) out.push_back(semantic_.get());
  if (structural_) out.push_back(structural_.get());
  return out;
}

FusedFeature FeaturePipeline::extract(const imaging::RawImage& img) const {
  std::vector<FeatureVector> parts;
  for (const auto* runner : runners()) {
    FeatureVector v = runner->embed(imaging::preprocess(img, runner->spec().preprocess));
    if (options_.l2_normalize) {
      double norm = 0.0;
      for (float x : v.values) norm += static_cast<double>(x) * x;
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (float& x : v.values) x = static_cast<float>(x / norm);
      }
    }
    parts.push_back(std::move(v));
  }
  return fuse_parts(parts);
}

size_t FeaturePipeline::dim() const {
  size_t d = 0;
  for (const auto* runner : runners()) d += static_cast<size_t>(runner->spec().embed_dim);
  return d;
}

std::string FeaturePipeline::description() const {
  std::string out = "mask=" + backbone_mask_name(options_.mask) +
                    ";l2=" + (options_.l2_normalize ? "1" : "0");
  for (const auto* runner : runners()) out += "|" + runner->spec().fingerprint();
  return out;
}

uint64_t FeaturePipeline::hash() const { return fnv1a64(description()); }

}  // namespace fusiondetect::head
