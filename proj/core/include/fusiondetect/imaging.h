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

#ifndef FUSIONDETECT_IMAGING_H_
#define FUSIONDETECT_IMAGING_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fusiondetect/rng.h"

namespace fusiondetect::imaging {

// 8-bit interleaved RGB, row-major.
struct RawImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  static RawImage filled(int width, int height, uint8_t value);

  size_t index(int x, int y, int c) const {
    return (static_cast<size_t>(y) * width + x) * 3 + c;
  }
  uint8_t at(int x, int y, int c) const { return data[index(x, y, c)]; }
  uint8_t& at(int x, int y, int c) { return data[index(x, y, c)]; }

  // Throws kInvalidArgument unless width, height >= 1 and the buffer holds
  // exactly width * height * 3 samples.
  void validate() const;

  friend bool operator==(const RawImage&, const RawImage&) = default;
};

// Channel-major (C, H, W) float tensor fed to a backbone.
struct TensorImage {
  int channels = 3;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  float at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
};

enum class Interpolation { kBilinear, kBicubic };

std::string interpolation_name(Interpolation interpolation);
Interpolation parse_interpolation(const std::string& name);

struct PreprocessSpec {
  int resize_shorter_side = 224;
  int crop_size = 224;
  Interpolation interpolation = Interpolation::kBicubic;
  std::array<float, 3> mean = {0.5f, 0.5f, 0.5f};
  std::array<float, 3> std = {0.5f, 0.5f, 0.5f};

  // Validating constructor; throws kInvalidArgument on a bad spec.
  static PreprocessSpec make(int resize_shorter_side, int crop_size,
                             Interpolation interpolation,
                             std::array<float, 3> mean,
                             std::array<float, 3> std);

  void validate() const;

  // Reference conventions of the two encoders.
  static PreprocessSpec semantic_vit_l14();
  static PreprocessSpec structural_vit_l14();

  friend bool operator==(const PreprocessSpec&, const PreprocessSpec&) = default;
};

enum class PerturbKind { kIdentity, kJpeg, kGaussianBlur };

struct PerturbSpec {
  PerturbKind kind = PerturbKind::kIdentity;
  int quality_factor = 0;
  double sigma = 0.0;

  static PerturbSpec identity() { return {}; }
  static PerturbSpec jpeg(int quality_factor);
  static PerturbSpec blur(double sigma);

  void validate() const;

  // Round-trippable token: "identity", "jpeg:75", "blur:2".
  std::string token() const;
  static PerturbSpec parse(const std::string& token);

  // Column label as used in robustness tables ("QF=75", "σ=2.0").
  std::string label() const;

  friend bool operator==(const PerturbSpec&, const PerturbSpec&) = default;
};

// Decoding. PNG and JPEG (baseline and progressive) are recognized by
// signature; alpha is dropped and grayscale replicated to RGB.
RawImage load_image(const std::filesystem::path& path);
RawImage decode_image(std::span<const uint8_t> bytes);

std::vector<uint8_t> encode_png(const RawImage& img);
void save_png(const RawImage& img, const std::filesystem::path& path);
std::vector<uint8_t> encode_jpeg(const RawImage& img, int quality_factor);

// Output size after scaling the shorter side to `shorter_side` while keeping
// the aspect ratio: the long side becomes round(long * shorter_side / short).
std::array<int, 2> resized_dims(int width, int height, int shorter_side);

// Separable resampling with the filter widened by the scale factor when
// downsampling. Output is rounded back to 8 bits.
RawImage resize(const RawImage& img, int out_width, int out_height,
                Interpolation interpolation);

TensorImage preprocess(const RawImage& img, const PreprocessSpec& spec);

RawImage jpeg_perturb(const RawImage& img, int quality_factor);

// Unit-sum Gaussian taps, radius ceil(3 sigma), length 2 * radius + 1.
std::vector<double> gaussian_kernel(double sigma);
RawImage gaussian_blur(const RawImage& img, double sigma);

RawImage apply_perturbation(const RawImage& img, const PerturbSpec& spec);

struct AugmentConfig {
  double probability = 0.10;
  int min_quality = 50;
  int max_quality = 95;
  double min_sigma = 0.5;
  double max_sigma = 3.0;

  void validate() const;
};

// Draws the perturbation train_augment would apply (identity with
// probability 1 - p; otherwise JPEG or blur with equal odds).
PerturbSpec draw_augmentation(Rng& rng, const AugmentConfig& config);

RawImage train_augment(const RawImage& img, Rng& rng,
                       const AugmentConfig& config = {});

}  // namespace fusiondetect::imaging

#endif  // FUSIONDETECT_IMAGING_H_
