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

#ifndef FUSIONDETECT_TESTS_SUPPORT_H_
#define FUSIONDETECT_TESTS_SUPPORT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fusiondetect/imaging.h"
#include "fusiondetect/manifest.h"

namespace fdtest {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "fd");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

fusiondetect::imaging::RawImage constant_image(int width, int height, uint8_t r, uint8_t g,
                                               uint8_t b);

// Gray images whose fused toy features are linearly separable: reals take
// a base level in [40, 100], fakes in [156, 216], plus a seeded tint of at
// most +-8 per channel and 2x2 pixel noise of +-4.
fusiondetect::imaging::RawImage separable_image(bool fake, uint64_t seed, int size = 224);

struct DatasetSpec {
  std::string dataset_id;
  std::vector<std::string> generators;
  int fakes_per_generator = 0;
  int reals = 0;
  fusiondetect::datasets::Split split = fusiondetect::datasets::Split::kTest;
};

// Writes PNGs under dir and a manifest.jsonl describing them; returns the
// manifest path. Paths in the manifest are relative to dir.
fs::path write_dataset(const fs::path& dir, const std::vector<DatasetSpec>& specs,
                       uint64_t seed, int size = 224);

// Minimal ONNX model: input (N,3,crop,crop) -> AveragePool 16/16 ->
// Flatten -> Gemm(W^T, b) -> output (N, dim). Weight is row-major
// (dim x pooled) with pooled = 3 * (crop/16)^2, which is exactly the toy
// backbone's computation.
std::vector<uint8_t> pool_gemm_onnx(int crop, int dim, std::span<const float> weight,
                                    std::span<const float> bias);

// Writes <stem>.onnx and <stem>.fdbackbone reproducing the toy backbone
// (dim, seed); returns the descriptor path.
fs::path write_toy_export(const fs::path& dir, const std::string& stem, int dim, uint64_t seed,
                          bool with_hash = true);

std::string read_text(const fs::path& path);
std::vector<char> read_bytes(const fs::path& path);

}  // namespace fdtest

#endif  // FUSIONDETECT_TESTS_SUPPORT_H_
