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

#include "fusiondetect/fusion.h"

#include "fusiondetect/error.h"

namespace fusiondetect::head {

FusedFeature fuse(const FeatureVector& semantic, const FeatureVector& structural) {
  const FeatureVector parts[2] = {semantic, structural};
  return fuse_parts(parts);
}

FusedFeature fuse_parts(std::span<const FeatureVector> parts) {
  FusedFeature out;
  size_t total = 0;
  for (const auto& p : parts) total += p.dim();
  out.values.reserve(total);
  for (const auto& p : parts) {
    if (!p.all_finite()) fail(ErrorCode::kNonFinite, "fuse: input contains NaN or Inf");
    out.values.insert(out.values.end(), p.values.begin(), p.values.end());
  }
  return out;
}

void FeatureMatrix::append(std::span<const float> row) {
  if (row.size() != dim) {
    fail(ErrorCode::kShapeMismatch, "feature row has dim " + std::to_string(row.size()) +
                                        ", matrix dim is " + std::to_string(dim));
  }
  values.insert(values.end(), row.begin(), row.end());
}

}  // namespace fusiondetect::head
