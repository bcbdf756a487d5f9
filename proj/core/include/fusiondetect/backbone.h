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

#ifndef FUSIONDETECT_BACKBONE_H_
#define FUSIONDETECT_BACKBONE_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fusiondetect/imaging.h"

namespace fusiondetect::backbone {

using imaging::PreprocessSpec;
using imaging::TensorImage;

// Reference embedding sizes of the two frozen encoders.
inline constexpr int kSemanticEmbedDim = 768;
inline constexpr int kStructuralEmbedDim = 1024;

struct FeatureVector {
  std::vector<float> values;

  size_t dim() const { return values.size(); }
  bool all_finite() const;
};

struct BackboneSpec {
  std::string id;
  int embed_dim = 0;
  PreprocessSpec preprocess;
  std::optional<std::filesystem::path> graph_path;
  // Digest of the graph file ("sha256:<hex>"), empty for built-in runners.
  std::string content_hash;

  void validate() const;

  // Stable text identifying everything that influences the embedding; feeds
  // the feature-cache key.
  std::string fingerprint() const;
};

// A frozen encoder. Implementations are immutable after construction and
// embed() may be called concurrently.
class BackboneRunner {
 public:
  virtual ~BackboneRunner() = default;

  virtual const BackboneSpec& spec() const = 0;

  // Throws kShapeMismatch if the tensor does not match the spec's crop size,
  // kNonFinite if the encoder produced NaN/Inf.
  virtual FeatureVector embed(const TensorImage& img) const = 0;

  // Equivalent to calling embed() per image; implementations may batch.
  virtual std::vector<FeatureVector> embed_batch(
      std::span<const TensorImage> images) const;

 protected:
  void check_input(const TensorImage& img) const;
  void check_output(const FeatureVector& out) const;
};

// Preprocessing used by toy runners: crop 224, unit-range normalization.
PreprocessSpec toy_preprocess();

// Test double: mean-pools 16x16 pixel patches per channel, then applies a
// seeded random linear projection. Linear in its input by construction.
class ToyBackbone final : public BackboneRunner {
 public:
  static constexpr int kPatch = 16;

  ToyBackbone(int dim, uint64_t seed, PreprocessSpec preprocess = toy_preprocess());

  const BackboneSpec& spec() const override { return spec_; }
  FeatureVector embed(const TensorImage& img) const override;

  int pooled_dim() const { return pooled_dim_; }
  // Row-major (dim x pooled_dim).
  const std::vector<double>& projection() const { return projection_; }
  std::vector<double> pool(const TensorImage& img) const;

 private:
  BackboneSpec spec_;
  int grid_;
  int pooled_dim_;
  std::vector<double> projection_;
};

std::unique_ptr<BackboneRunner> toy_backbone(int dim, uint64_t seed);

// Sidecar describing an exported encoder graph. Line-delimited key=value
// pairs; '#' starts a comment line.
struct ExportDescriptor {
  static constexpr const char* kFormat = "fusiondetect-backbone/1";

  std::string id;
  int embed_dim = 0;
  std::filesystem::path graph;  // resolved against the descriptor directory
  PreprocessSpec preprocess;
  std::string provenance;
  std::string content_hash;
  std::string graph_format = "onnx";
  int opset = 0;
  std::string pooling;

  static ExportDescriptor parse(const std::string& text,
                                const std::filesystem::path& base_dir);
  static ExportDescriptor load(const std::filesystem::path& path);
  // Floats are written with 9 significant digits, so parse(serialize())
  // reproduces every float32 constant exactly.
  std::string serialize() const;

  BackboneSpec to_spec() const;
};

std::string sha256_file(const std::filesystem::path& path);

// Executes an exported (N,3,H,W) -> (N,embed_dim) graph. The declared
// embed_dim and content hash are verified at load time.
class GraphBackbone final : public BackboneRunner {
 public:
  explicit GraphBackbone(const ExportDescriptor& descriptor);
  ~GraphBackbone() override;

  const BackboneSpec& spec() const override { return spec_; }
  FeatureVector embed(const TensorImage& img) const override;
  std::vector<FeatureVector> embed_batch(
      std::span<const TensorImage> images) const override;

 private:
  struct Impl;
  BackboneSpec spec_;
  std::unique_ptr<Impl> impl_;
};

std::unique_ptr<BackboneRunner> load_graph_backbone(
    const std::filesystem::path& descriptor_path);

// "toy:<dim>:<seed>" or a descriptor path.
std::unique_ptr<BackboneRunner> open_backbone(const std::string& locator);

// Stored (input image, expected embedding) pair for checking that a graph
// reproduces its reference implementation.
struct ParityFixture {
  std::filesystem::path image_path;
  std::vector<float> expected;
  double tolerance = 1e-3;
};

// Embedding files: magic "FDEMB1", u32 dim, dim little-endian f32.
void write_embedding_file(const std::filesystem::path& path,
                          std::span<const float> values);
std::vector<float> read_embedding_file(const std::filesystem::path& path);

// Every "<name>.emb" in dir paired with "<name>.png" (or .jpg).
std::vector<ParityFixture> load_parity_fixtures(const std::filesystem::path& dir,
                                                double tolerance = 1e-3);

// Max-abs difference between the runner's embedding and the fixture.
// Throws kShapeMismatch when the fixture length differs from embed_dim.
double parity_error(const BackboneRunner& runner, const ParityFixture& fixture);

}  // namespace fusiondetect::backbone

#endif  // FUSIONDETECT_BACKBONE_H_
