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

#ifndef FUSIONDETECT_FUSION_H_
#define FUSIONDETECT_FUSION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "fusiondetect/backbone.h"

namespace fusiondetect::head {

using backbone::FeatureVector;

struct FusedFeature {
  std::vector<float> values;

  size_t dim() const { return values.size(); }
};

// Concatenation in (semantic, structural) order. Throws kNonFinite if either
// input holds NaN/Inf.
FusedFeature fuse(const FeatureVector& semantic, const FeatureVector& structural);

// Concatenates the enabled branches in order; a single part passes through.
FusedFeature fuse_parts(std::span<const FeatureVector> parts);

// Dense row-major matrix of fused features.
struct FeatureMatrix {
  size_t dim = 0;
  std::vector<float> values;

  FeatureMatrix() = default;
  explicit FeatureMatrix(size_t dim) : dim(dim) {}

  size_t rows() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> row(size_t i) const {
    return std::span<const float>(values).subspan(i * dim, dim);
  }
  // Throws kShapeMismatch when the row length differs from dim.
  void append(std::span<const float> row);
};

}  // namespace fusiondetect::head

#endif  // FUSIONDETECT_FUSION_H_
