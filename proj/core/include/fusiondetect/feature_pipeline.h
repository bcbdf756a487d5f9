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

#ifndef FUSIONDETECT_FEATURE_PIPELINE_H_
#define FUSIONDETECT_FEATURE_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fusiondetect/backbone.h"
#include "fusiondetect/fusion.h"
#include "fusiondetect/imaging.h"

namespace fusiondetect::head {

// Which encoder branches feed the fused feature.
enum class BackboneMask { kSemantic, kStructural, kBoth };

std::string backbone_mask_name(BackboneMask mask);
BackboneMask parse_backbone_mask(const std::string& name);

struct FeatureOptions {
  BackboneMask mask = BackboneMask::kBoth;
  // Features are used raw by default.
  bool l2_normalize = false;
};

// Image -> per-backbone preprocess -> embed -> (optional L2) -> fuse.
class FeaturePipeline {
 public:
  // Runners for disabled branches may be null.
  FeaturePipeline(std::shared_ptr<const backbone::BackboneRunner> semantic,
                  std::shared_ptr<const backbone::BackboneRunner> structural,
                  FeatureOptions options = {});

  FusedFeature extract(const imaging::RawImage& img) const;

  size_t dim() const;
  const FeatureOptions& options() const { return options_; }

  // Enabled runners in fusion order.
  std::vector<const backbone::BackboneRunner*> runners() const;

  // Key identifying the feature space: enabled backbone fingerprints in
  // order, the mask, and the normalization flag.
  std::string description() const;
  uint64_t hash() const;

 private:
  std::shared_ptr<const backbone::BackboneRunner> semantic_;
  std::shared_ptr<const backbone::BackboneRunner> structural_;
  FeatureOptions options_;
};

}  // namespace fusiondetect::head

#endif  // FUSIONDETECT_FEATURE_PIPELINE_H_
