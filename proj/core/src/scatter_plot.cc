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

#include <algorithm>
#include <array>
#include <cmath>

#include "fusiondetect/error.h"
#include "fusiondetect/pipeline.h"

namespace fusiondetect::pipeline {
namespace {

constexpr std::array<std::array<uint8_t, 3>, 12> kPalette = {{
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40},
    {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {127, 127, 127},
    {188, 189, 34}, {23, 190, 207}, {0, 0, 128}, {128, 128, 0},
}};
constexpr int kDotRadius = 3;

void set_pixel(imaging::RawImage& img, int x, int y, const std::array<uint8_t, 3>& rgb) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  for (int c = 0; c < 3; ++c) img.at(x, y, c) = rgb[c];
}

}  // namespace

imaging::RawImage render_scatter(std::span<const double> xy, std::span<const int> classes,
                                 int size) {
  if (size < 16) fail(ErrorCode::kInvalidArgument, "scatter size must be >= 16");
  if (xy.size() != 2 * classes.size()) {
    fail(ErrorCode::kShapeMismatch, "scatter: " + std::to_string(xy.size()) +
                                        " coordinates for " + std::to_string(classes.size()) +
                                        " points");
  }
  imaging::RawImage img = imaging::RawImage::filled(size, size, 255);
  const int margin = std::max(2, size / 20);
  const int lo = margin;
  const int hi = size - 1 - margin;
  const std::array<uint8_t, 3> black = {0, 0, 0};
  for (int i = lo; i <= hi; ++i) {
    set_pixel(img, i, lo, black);
    set_pixel(img, i, hi, black);
    set_pixel(img, lo, i, black);
    set_pixel(img, hi, i, black);
  }
  if (classes.empty()) return img;

  double min_x = xy[0], max_x = xy[0], min_y = xy[1], max_y = xy[1];
  for (size_t i = 0; i < classes.size(); ++i) {
    min_x = std::min(min_x, xy[2 * i]);
    max_x = std::max(max_x, xy[2 * i]);
    min_y = std::min(min_y, xy[2 * i + 1]);
    max_y = std::max(max_y, xy[2 * i + 1]);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
  const double inner = hi - lo - 4 * kDotRadius;
  const double cx = 0.5 * (min_x + max_x);
  const double cy = 0.5 * (min_y + max_y);
  const double mid = 0.5 * (lo + hi);
  for (size_t i = 0; i < classes.size(); ++i) {
    const int px = static_cast<int>(std::lround(mid + (xy[2 * i] - cx) / span * inner));
    const int py = static_cast<int>(std::lround(mid - (xy[2 * i + 1] - cy) / span * inner));
    const auto& rgb = kPalette[static_cast<size_t>(std::abs(classes[i])) % kPalette.size()];
    for (int dy = -kDotRadius; dy <= kDotRadius; ++dy) {
      for (int dx = -kDotRadius; dx <= kDotRadius; ++dx) {
        if (dx * dx + dy * dy <= kDotRadius * kDotRadius) set_pixel(img, px + dx, py + dy, rgb);
      }
    }
  }
  return img;
}

}  // namespace fusiondetect::pipeline
