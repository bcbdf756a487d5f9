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

#include "fusiondetect/imaging.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "fusiondetect/error.h"

namespace fusiondetect::imaging {
namespace {

uint8_t clamp_to_u8(double v) {
  const double r = std::round(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<uint8_t>(r);
}

double bilinear_filter(double x) {
  x = std::fabs(x);
  return x < 1.0 ? 1.0 - x : 0.0;
}

// Keys cubic with a = -0.5.
double bicubic_filter(double x) {
  constexpr double a = -0.5;
  x = std::fabs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

struct ResampleTaps {
  std::vector<int> first;
  std::vector<int> count;
  std::vector<double> weights;  // count[i] entries per output, padded to max
  int stride = 0;
};

ResampleTaps compute_taps(int in_size, int out_size, Interpolation interp) {
  const double support_base = interp == Interpolation::kBicubic ? 2.0 : 1.0;
  const double scale = static_cast<double>(in_size) / out_size;
  const double filter_scale = std::max(scale, 1.0);
  const double support = support_base * filter_scale;
  ResampleTaps taps;
  taps.stride = static_cast<int>(std::ceil(support)) * 2 + 1;
  taps.first.resize(out_size);
  taps.count.resize(out_size);
  taps.weights.assign(static_cast<size_t>(out_size) * taps.stride, 0.0);
  for (int i = 0; i < out_size; ++i) {
    const double center = (i + 0.5) * scale;
    int lo = static_cast<int>(std::floor(center - support + 0.5));
    int hi = static_cast<int>(std::floor(center + support + 0.5));
    lo = std::max(lo, 0);
    hi = std::min(hi, in_size);
    const int n = std::min(hi - lo, taps.stride);
    double total = 0.0;
    double* w = &taps.weights[static_cast<size_t>(i) * taps.stride];
    for (int k = 0; k < n; ++k) {
      const double x = (lo + k + 0.5 - center) / filter_scale;
      w[k] = interp == Interpolation::kBicubic ? bicubic_filter(x)
                                               : bilinear_filter(x);
      total += w[k];
    }
    if (total != 0.0) {
      for (int k = 0; k < n; ++k) w[k] /= total;
    }
    taps.first[i] = lo;
    taps.count[i] = n;
  }
  return taps;
}

}  // namespace

RawImage RawImage::filled(int width, int height, uint8_t value) {
  RawImage img;
  img.width = width;
  img.height = height;
  img.data.assign(static_cast<size_t>(width) * height * 3, value);
  return img;
}

void RawImage::validate() const {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
  if (data.size() != static_cast<size_t>(width) * height * 3) {
    fail(ErrorCode::kInvalidArgument, "image buffer does not match width*height*3");
  }
}

std::string interpolation_name(Interpolation interpolation) {
  return interpolation == Interpolation::kBicubic ? "bicubic" : "bilinear";
}

Interpolation parse_interpolation(const std::string& name) {
  if (name == "bicubic") return Interpolation::kBicubic;
  if (name == "bilinear") return Interpolation::kBilinear;
  fail(ErrorCode::kParseError, "unknown interpolation '" + name + "'");
}

PreprocessSpec PreprocessSpec::make(int resize_shorter_side, int crop_size,
                                    Interpolation interpolation,
                                    std::array<float, 3> mean,
                                    std::array<float, 3> std) {
  PreprocessSpec spec{resize_shorter_side, crop_size, interpolation, mean, std};
  spec.validate();
  return spec;
}

void PreprocessSpec::validate() const {
  if (crop_size < 1 || resize_shorter_side < 1) {
    fail(ErrorCode::kInvalidArgument, "preprocess sizes must be positive");
  }
  if (crop_size > resize_shorter_side) {
    fail(ErrorCode::kInvalidArgument, "crop_size exceeds resize_shorter_side");
  }
  for (int c = 0; c < 3; ++c) {
    if (!(std[c] > 0.0f) || !std::isfinite(std[c]) || !std::isfinite(mean[c])) {
      fail(ErrorCode::kInvalidArgument, "normalization std must be positive and finite");
    }
  }
}

PreprocessSpec PreprocessSpec::semantic_vit_l14() {
  return make(224, 224, Interpolation::kBicubic,
              {0.48145466f, 0.4578275f, 0.40821073f},
              {0.26862954f, 0.26130258f, 0.27577711f});
}

PreprocessSpec PreprocessSpec::structural_vit_l14() {
  return make(256, 224, Interpolation::kBicubic, {0.485f, 0.456f, 0.406f},
              {0.229f, 0.224f, 0.225f});
}

PerturbSpec PerturbSpec::jpeg(int quality_factor) {
  PerturbSpec spec{PerturbKind::kJpeg, quality_factor, 0.0};
  spec.validate();
  return spec;
}

PerturbSpec PerturbSpec::blur(double sigma) {
  PerturbSpec spec{PerturbKind::kGaussianBlur, 0, sigma};
  spec.validate();
  return spec;
}

void PerturbSpec::validate() const {
  switch (kind) {
    case PerturbKind::kIdentity:
      return;
    case PerturbKind::kJpeg:
      if (quality_factor < 1 || quality_factor > 100) {
        fail(ErrorCode::kInvalidArgument,
             "jpeg quality factor must be in [1,100], got " +
                 std::to_string(quality_factor));
      }
      return;
    case PerturbKind::kGaussianBlur:
      if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        fail(ErrorCode::kInvalidArgument, "blur sigma must be > 0");
      }
      return;
  }
}

std::string PerturbSpec::token() const {
  char buf[64];
  switch (kind) {
    case PerturbKind::kIdentity:
      return "identity";
    case PerturbKind::kJpeg:
      return "jpeg:" + std::to_string(quality_factor);
    case PerturbKind::kGaussianBlur:
      std::snprintf(buf, sizeof(buf), "blur:%g", sigma);
      return buf;
  }
  return "identity";
}

PerturbSpec PerturbSpec::parse(const std::string& token) {
  if (token == "identity" || token == "clean" || token == "none") return identity();
  const auto colon = token.find(':');
  if (colon == std::string::npos) {
    fail(ErrorCode::kParseError, "bad perturbation '" + token + "'");
  }
  const std::string kind = token.substr(0, colon);
  const std::string value = token.substr(colon + 1);
  try {
    size_t used = 0;
    if (kind == "jpeg") {
      const int qf = std::stoi(value, &used);
      if (used == value.size()) return jpeg(qf);
    } else if (kind == "blur") {
      const double sigma = std::stod(value, &used);
      if (used == value.size()) return blur(sigma);
    }
  } catch (const std::logic_error&) {
    // Reported below.
  }
  fail(ErrorCode::kParseError, "bad perturbation '" + token + "'");
}

std::string PerturbSpec::label() const {
  char buf[64];
  switch (kind) {
    case PerturbKind::kIdentity:
      return "No Degradation";
    case PerturbKind::kJpeg:
      return "QF=" + std::to_string(quality_factor);
    case PerturbKind::kGaussianBlur:
      std::snprintf(buf, sizeof(buf), "σ=%.1f", sigma);
      return buf;
  }
  return "";
}

std::array<int, 2> resized_dims(int width, int height, int shorter_side) {
  if (width < 1 || height < 1 || shorter_side < 1) {
    fail(ErrorCode::kInvalidArgument, "resized_dims: non-positive size");
  }
  if (width <= height) {
    const double scaled = std::round(static_cast<double>(height) * shorter_side / width);
    return {shorter_side, static_cast<int>(scaled)};
  }
  const double scaled = std::round(static_cast<double>(width) * shorter_side / height);
  return {static_cast<int>(scaled), shorter_side};
}

RawImage resize(const RawImage& img, int out_width, int out_height,
                Interpolation interpolation) {
  img.validate();
  if (out_width < 1 || out_height < 1) {
    fail(ErrorCode::kInvalidArgument, "resize target must be >= 1");
  }
  if (out_width == img.width && out_height == img.height) return img;

  const ResampleTaps htaps = compute_taps(img.width, out_width, interpolation);
  const ResampleTaps vtaps = compute_taps(img.height, out_height, interpolation);

  // Horizontal pass into a float buffer, vertical pass rounds to 8 bits.
  std::vector<double> tmp(static_cast<size_t>(out_width) * img.height * 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const double* w = &htaps.weights[static_cast<size_t>(x) * htaps.stride];
      double acc[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < htaps.count[x]; ++k) {
        const int sx = htaps.first[x] + k;
        for (int c = 0; c < 3; ++c) acc[c] += w[k] * img.at(sx, y, c);
      }
      for (int c = 0; c < 3; ++c) {
        tmp[(static_cast<size_t>(y) * out_width + x) * 3 + c] = acc[c];
      }
    }
  }
  RawImage out;
  out.width = out_width;
  out.height = out_height;
  out.data.resize(static_cast<size_t>(out_width) * out_height * 3);
  for (int y = 0; y < out_height; ++y) {
    const double* w = &vtaps.weights[static_cast<size_t>(y) * vtaps.stride];
    for (int x = 0; x < out_width; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < vtaps.count[y]; ++k) {
        const int sy = vtaps.first[y] + k;
        const double* src = &tmp[(static_cast<size_t>(sy) * out_width + x) * 3];
        for (int c = 0; c < 3; ++c) acc[c] += w[k] * src[c];
      }
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = clamp_to_u8(acc[c]);
    }
  }
  return out;
}

TensorImage preprocess(const RawImage& img, const PreprocessSpec& spec) {
  img.validate();
  spec.validate();
  const auto [rw, rh] = resized_dims(img.width, img.height, spec.resize_shorter_side);
  const RawImage resized = resize(img, rw, rh, spec.interpolation);
  const int crop = spec.crop_size;
  const int left = static_cast<int>(std::round((rw - crop) / 2.0));
  const int top = static_cast<int>(std::round((rh - crop) / 2.0));

  TensorImage out;
  out.channels = 3;
  out.height = crop;
  out.width = crop;
  out.data.resize(static_cast<size_t>(3) * crop * crop);
  for (int c = 0; c < 3; ++c) {
    const float mean = spec.mean[c];
    const float inv_std = 1.0f / spec.std[c];
    for (int y = 0; y < crop; ++y) {
      for (int x = 0; x < crop; ++x) {
        const float v = static_cast<float>(resized.at(left + x, top + y, c)) / 255.0f;
        out.data[(static_cast<size_t>(c) * crop + y) * crop + x] = (v - mean) * inv_std;
      }
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorCode::kInvalidArgument, "blur sigma must be > 0");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    kernel[i + radius] = w;
    total += w;
  }
  for (double& w : kernel) w /= total;
  return kernel;
}

RawImage gaussian_blur(const RawImage& img, double sigma) {
  img.validate();
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width;
  const int h = img.height;

  std::vector<double> tmp(static_cast<size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int k = -radius; k <= radius; ++k) {
        const int sx = std::clamp(x + k, 0, w - 1);
        const double kw = kernel[k + radius];
        for (int c = 0; c < 3; ++c) acc[c] += kw * img.at(sx, y, c);
      }
      for (int c = 0; c < 3; ++c) tmp[(static_cast<size_t>(y) * w + x) * 3 + c] = acc[c];
    }
  }
  RawImage out;
  out.width = w;
  out.height = h;
  out.data.resize(img.data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int k = -radius; k <= radius; ++k) {
        const int sy = std::clamp(y + k, 0, h - 1);
        const double kw = kernel[k + radius];
        const double* src = &tmp[(static_cast<size_t>(sy) * w + x) * 3];
        for (int c = 0; c < 3; ++c) acc[c] += kw * src[c];
      }
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = clamp_to_u8(acc[c]);
    }
  }
  return out;
}

RawImage apply_perturbation(const RawImage& img, const PerturbSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case PerturbKind::kIdentity:
      return img;
    case PerturbKind::kJpeg:
      return jpeg_perturb(img, spec.quality_factor);
    case PerturbKind::kGaussianBlur:
      return gaussian_blur(img, spec.sigma);
  }
  return img;
}

void AugmentConfig::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "augment probability must be in [0,1]");
  }
  if (min_quality < 1 || max_quality > 100 || min_quality > max_quality) {
    fail(ErrorCode::kInvalidArgument, "augment quality range must lie in [1,100]");
  }
  if (!(min_sigma > 0.0) || min_sigma > max_sigma) {
    fail(ErrorCode::kInvalidArgument, "augment sigma range must be positive");
  }
}

PerturbSpec draw_augmentation(Rng& rng, const AugmentConfig& config) {
  config.validate();
  if (!rng.bernoulli(config.probability)) return PerturbSpec::identity();
  if (rng.bernoulli(0.5)) {
    return PerturbSpec::jpeg(
        static_cast<int>(rng.uniform_int(config.min_quality, config.max_quality)));
  }
  return PerturbSpec::blur(rng.uniform(config.min_sigma, config.max_sigma));
}

RawImage train_augment(const RawImage& img, Rng& rng, const AugmentConfig& config) {
  return apply_perturbation(img, draw_augmentation(rng, config));
}

}  // namespace fusiondetect::imaging
