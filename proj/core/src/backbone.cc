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

#include "fusiondetect/backbone.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "binary_io.h"
#include "file_util.h"
#include "fusiondetect/error.h"
#include "fusiondetect/rng.h"

namespace fusiondetect::backbone {
namespace {

std::string format_float(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

std::string format_triplet(const std::array<float, 3>& v) {
  return format_float(v[0]) + "," + format_float(v[1]) + "," + format_float(v[2]);
}

std::array<float, 3> parse_triplet(const std::string& key, const std::string& value) {
  const auto parts = internal::split(value, ',');
  if (parts.size() != 3) {
    fail(ErrorCode::kParseError, "descriptor key '" + key + "' needs 3 values");
  }
  std::array<float, 3> out{};
  for (int i = 0; i < 3; ++i) {
    try {
      size_t used = 0;
      const std::string token = internal::trim(parts[i]);
      out[i] = std::stof(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::logic_error&) {
      fail(ErrorCode::kParseError, "descriptor key '" + key + "': bad number");
    }
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::kParseError, "descriptor key '" + key + "': bad integer '" + value + "'");
}

}  // namespace

bool FeatureVector::all_finite() const {
  return std::all_of(values.begin(), values.end(),
                     [](float v) { return std::isfinite(v); });
}

void BackboneSpec::validate() const {
  if (id.empty()) fail(ErrorCode::kInvalidArgument, "backbone id must be non-empty");
  if (embed_dim <= 0) fail(ErrorCode::kInvalidArgument, "embed_dim must be positive");
  preprocess.validate();
}

std::string BackboneSpec::fingerprint() const {
  std::ostringstream os;
  os << "id=" << id << ";dim=" << embed_dim
     << ";resize=" << preprocess.resize_shorter_side
     << ";crop=" << preprocess.crop_size
     << ";interp=" << imaging::interpolation_name(preprocess.interpolation)
     << ";mean=" << format_triplet(preprocess.mean)
     << ";std=" << format_triplet(preprocess.std)
     << ";hash=" << content_hash;
  return os.str();
}

std::vector<FeatureVector> BackboneRunner::embed_batch(
    std::span<const TensorImage> images) const {
  std::vector<FeatureVector> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(embed(img));
  return out;
}

void BackboneRunner::check_input(const TensorImage& img) const {
  const int crop = spec().preprocess.crop_size;
  if (img.channels != 3 || img.height != crop || img.width != crop ||
      img.data.size() != static_cast<size_t>(3) * crop * crop) {
    fail(ErrorCode::kShapeMismatch,
         spec().id + ": expected (3," + std::to_string(crop) + "," +
             std::to_string(crop) + ") input, got (" +
             std::to_string(img.channels) + "," + std::to_string(img.height) +
             "," + std::to_string(img.width) + ")");
  }
}

void BackboneRunner::check_output(const FeatureVector& out) const {
  if (out.dim() != static_cast<size_t>(spec().embed_dim)) {
    fail(ErrorCode::kShapeMismatch, spec().id + ": embedding has dim " +
                                        std::to_string(out.dim()) + ", expected " +
                                        std::to_string(spec().embed_dim));
  }
  if (!out.all_finite()) {
    fail(ErrorCode::kNonFinite, spec().id + ": embedding contains NaN or Inf");
  }
}

PreprocessSpec toy_preprocess() {
  return PreprocessSpec::make(224, 224, imaging::Interpolation::kBicubic,
                              {0.5f, 0.5f, 0.5f}, {0.5f, 0.5f, 0.5f});
}

ToyBackbone::ToyBackbone(int dim, uint64_t seed, PreprocessSpec preprocess) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "toy backbone dim must be >= 1");
  preprocess.validate();
  if (preprocess.crop_size % kPatch != 0) {
    fail(ErrorCode::kInvalidArgument, "toy backbone crop must be a multiple of 16");
  }
  spec_.id = "toy-d" + std::to_string(dim) + "-s" + std::to_string(seed);
  spec_.embed_dim = dim;
  spec_.preprocess = preprocess;
  grid_ = preprocess.crop_size / kPatch;
  pooled_dim_ = 3 * grid_ * grid_;
  projection_.resize(static_cast<size_t>(dim) * pooled_dim_);
  Rng rng(derive_seed(seed, static_cast<uint64_t>(dim)));
  const double scale = 1.0 / std::sqrt(static_cast<double>(pooled_dim_));
  for (double& w : projection_) w = rng.normal() * scale;
}

std::vector<double> ToyBackbone::pool(const TensorImage& img) const {
  check_input(img);
  std::vector<double> pooled(pooled_dim_, 0.0);
  const double inv_area = 1.0 / (kPatch * kPatch);
  for (int c = 0; c < 3; ++c) {
    for (int gy = 0; gy < grid_; ++gy) {
      for (int gx = 0; gx < grid_; ++gx) {
        double acc = 0.0;
        for (int y = gy * kPatch; y < (gy + 1) * kPatch; ++y) {
          for (int x = gx * kPatch; x < (gx + 1) * kPatch; ++x) {
            acc += img.at(c, y, x);
          }
        }
        pooled[(static_cast<size_t>(c) * grid_ + gy) * grid_ + gx] = acc * inv_area;
      }
    }
  }
  return pooled;
}

FeatureVector ToyBackbone::embed(const TensorImage& img) const {
  const std::vector<double> pooled = pool(img);
  FeatureVector out;
  out.values.resize(spec_.embed_dim);
  for (int k = 0; k < spec_.embed_dim; ++k) {
    const double* row = &projection_[static_cast<size_t>(k) * pooled_dim_];
    double acc = 0.0;
    for (int j = 0; j < pooled_dim_; ++j) acc += row[j] * pooled[j];
    out.values[k] = static_cast<float>(acc);
  }
  check_output(out);
  return out;
}

std::unique_ptr<BackboneRunner> toy_backbone(int dim, uint64_t seed) {
  return std::make_unique<ToyBackbone>(dim, seed);
}

ExportDescriptor ExportDescriptor::parse(const std::string& text,
                                         const std::filesystem::path& base_dir) {
  ExportDescriptor d;
  bool have_format = false, have_dim = false, have_graph = false;
  bool have_mean = false, have_std = false;
  int resize = 0, crop = 0;
  imaging::Interpolation interp = imaging::Interpolation::kBicubic;
  std::array<float, 3> mean{}, stdev{};
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = internal::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kParseError, "descriptor line " + std::to_string(line_no) +
                                       ": expected key=value");
    }
    const std::string key = internal::trim(line.substr(0, eq));
    const std::string value = internal::trim(line.substr(eq + 1));
    if (key == "format") {
      if (value != kFormat) {
        fail(ErrorCode::kVersionMismatch, "unsupported descriptor format '" + value + "'");
      }
      have_format = true;
    } else if (key == "id") {
      d.id = value;
    } else if (key == "embed_dim") {
      d.embed_dim = parse_int(key, value);
      have_dim = true;
    } else if (key == "graph") {
      d.graph = base_dir / value;
      have_graph = true;
    } else if (key == "graph_format") {
      d.graph_format = value;
    } else if (key == "opset") {
      d.opset = parse_int(key, value);
    } else if (key == "resize_shorter_side") {
      resize = parse_int(key, value);
    } else if (key == "crop_size") {
      crop = parse_int(key, value);
    } else if (key == "interpolation") {
      interp = imaging::parse_interpolation(value);
    } else if (key == "mean") {
      mean = parse_triplet(key, value);
      have_mean = true;
    } else if (key == "std") {
      stdev = parse_triplet(key, value);
      have_std = true;
    } else if (key == "provenance") {
      d.provenance = value;
    } else if (key == "content_hash") {
      d.content_hash = value;
    } else if (key == "pooling") {
      d.pooling = value;
    }
    // Unknown keys are ignored so newer exporters stay readable.
  }
  if (!have_format || d.id.empty() || !have_dim || !have_graph || !have_mean ||
      !have_std || resize == 0 || crop == 0) {
    fail(ErrorCode::kParseError,
         "descriptor is missing one of format, id, embed_dim, graph, "
         "resize_shorter_side, crop_size, mean, std");
  }
  if (d.graph_format != "onnx") {
    fail(ErrorCode::kVersionMismatch, "unsupported graph format '" + d.graph_format + "'");
  }
  try {
    d.preprocess = PreprocessSpec::make(resize, crop, interp, mean, stdev);
  } catch (const Error& e) {
    fail(ErrorCode::kParseError, "descriptor preprocessing: " + e.message());
  }
  if (d.embed_dim <= 0) fail(ErrorCode::kParseError, "descriptor embed_dim must be positive");
  return d;
}

ExportDescriptor ExportDescriptor::load(const std::filesystem::path& path) {
  try {
    return parse(internal::read_text_file(path), path.parent_path());
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.message());
  }
}

std::string ExportDescriptor::serialize() const {
  std::ostringstream os;
  os << "format=" << kFormat << "\n"
     << "id=" << id << "\n"
     << "embed_dim=" << embed_dim << "\n"
     << "graph=" << graph.filename().string() << "\n"
     << "graph_format=" << graph_format << "\n";
  if (opset > 0) os << "opset=" << opset << "\n";
  os << "resize_shorter_side=" << preprocess.resize_shorter_side << "\n"
     << "crop_size=" << preprocess.crop_size << "\n"
     << "interpolation=" << imaging::interpolation_name(preprocess.interpolation) << "\n"
     << "mean=" << format_triplet(preprocess.mean) << "\n"
     << "std=" << format_triplet(preprocess.std) << "\n";
  if (!pooling.empty()) os << "pooling=" << pooling << "\n";
  if (!provenance.empty()) os << "provenance=" << provenance << "\n";
  if (!content_hash.empty()) os << "content_hash=" << content_hash << "\n";
  return os.str();
}

BackboneSpec ExportDescriptor::to_spec() const {
  BackboneSpec spec;
  spec.id = id;
  spec.embed_dim = embed_dim;
  spec.preprocess = preprocess;
  spec.graph_path = graph;
  spec.content_hash = content_hash;
  spec.validate();
  return spec;
}

std::string sha256_file(const std::filesystem::path& path) {
  const auto data = internal::read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr)) {
    fail(ErrorCode::kIoError, "sha256 failed for " + path.string());
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::unique_ptr<BackboneRunner> load_graph_backbone(
    const std::filesystem::path& descriptor_path) {
  return std::make_unique<GraphBackbone>(ExportDescriptor::load(descriptor_path));
}

std::unique_ptr<BackboneRunner> open_backbone(const std::string& locator) {
  if (locator.rfind("toy:", 0) == 0) {
    const auto parts = internal::split(locator, ':');
    if (parts.size() != 3) {
      fail(ErrorCode::kInvalidArgument, "toy backbone locator must be toy:<dim>:<seed>");
    }
    try {
      size_t used_dim = 0, used_seed = 0;
      const int dim = std::stoi(parts[1], &used_dim);
      const unsigned long long seed = std::stoull(parts[2], &used_seed);
      if (used_dim != parts[1].size() || used_seed != parts[2].size()) {
        throw std::invalid_argument(locator);
      }
      return toy_backbone(dim, seed);
    } catch (const std::logic_error&) {
      fail(ErrorCode::kInvalidArgument, "bad toy backbone locator '" + locator + "'");
    }
  }
  return load_graph_backbone(locator);
}

void write_embedding_file(const std::filesystem::path& path,
                          std::span<const float> values) {
  internal::ByteWriter w;
  w.bytes("FDEMB1");
  w.scalar<uint32_t>(static_cast<uint32_t>(values.size()));
  w.array(values);
  internal::write_file_atomic(path, w.data());
}

std::vector<float> read_embedding_file(const std::filesystem::path& path) {
  const auto data = internal::read_file(path);
  internal::ByteReader r(data);
  if (!r.expect("FDEMB1")) fail(ErrorCode::kParseError, path.string() + ": not an embedding file");
  const uint32_t dim = r.scalar<uint32_t>();
  if (!r.ok() || r.remaining() != static_cast<size_t>(dim) * sizeof(float)) {
    fail(ErrorCode::kParseError, path.string() + ": truncated embedding file");
  }
  std::vector<float> values(dim);
  r.array(std::span<float>(values));
  return values;
}

std::vector<ParityFixture> load_parity_fixtures(const std::filesystem::path& dir,
                                                double tolerance) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    fail(ErrorCode::kFileNotFound, dir.string());
  }
  std::vector<std::filesystem::path> embeddings;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".emb") embeddings.push_back(entry.path());
  }
  std::sort(embeddings.begin(), embeddings.end());
  std::vector<ParityFixture> fixtures;
  for (const auto& emb : embeddings) {
    ParityFixture f;
    f.expected = read_embedding_file(emb);
    f.tolerance = tolerance;
    for (const char* ext : {".png", ".jpg", ".jpeg"}) {
      auto candidate = emb;
      candidate.replace_extension(ext);
      if (std::filesystem::exists(candidate)) {
        f.image_path = candidate;
        break;
      }
    }
    if (f.image_path.empty()) {
      fail(ErrorCode::kFileNotFound, "no image next to fixture " + emb.string());
    }
    fixtures.push_back(std::move(f));
  }
  return fixtures;
}

double parity_error(const BackboneRunner& runner, const ParityFixture& fixture) {
  if (fixture.expected.size() != static_cast<size_t>(runner.spec().embed_dim)) {
    fail(ErrorCode::kShapeMismatch,
         "fixture " + fixture.image_path.string() + " has " +
             std::to_string(fixture.expected.size()) + " values, backbone dim is " +
             std::to_string(runner.spec().embed_dim));
  }
  const auto img = imaging::load_image(fixture.image_path);
  const auto out = runner.embed(imaging::preprocess(img, runner.spec().preprocess));
  double worst = 0.0;
  for (size_t i = 0; i < out.values.size(); ++i) {
    worst = std::max(worst, std::fabs(static_cast<double>(out.values[i]) -
                                      static_cast<double>(fixture.expected[i])));
  }
  return worst;
}

}  // namespace fusiondetect::backbone
