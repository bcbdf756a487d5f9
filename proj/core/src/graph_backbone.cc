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

#include <mutex>
#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "fusiondetect/backbone.h"
#include "fusiondetect/error.h"

namespace fusiondetect::backbone {

// cv::dnn::Net::forward mutates internal buffers, so calls are serialized.
struct GraphBackbone::Impl {
  cv::dnn::Net net;
  std::mutex mutex;

  cv::Mat run(const cv::Mat& blob) {
    std::lock_guard<std::mutex> lock(mutex);
    net.setInput(blob);
    return net.forward().clone();
  }
};

namespace {

cv::Mat make_blob(std::span<const TensorImage> images, int crop) {
  const int dims[4] = {static_cast<int>(images.size()), 3, crop, crop};
  cv::Mat blob(4, dims, CV_32F);
  const size_t per_image = static_cast<size_t>(3) * crop * crop;
  float* dst = blob.ptr<float>();
  for (size_t i = 0; i < images.size(); ++i) {
    std::copy(images[i].data.begin(), images[i].data.end(), dst + i * per_image);
  }
  return blob;
}

}  // namespace

GraphBackbone::GraphBackbone(const ExportDescriptor& descriptor)
    : spec_(descriptor.to_spec()), impl_(std::make_unique<Impl>()) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(descriptor.graph, ec)) {
    fail(ErrorCode::kGraphExecution, "graph file missing: " + descriptor.graph.string());
  }
  if (!descriptor.content_hash.empty()) {
    const std::string actual = sha256_file(descriptor.graph);
    if (actual != descriptor.content_hash) {
      fail(ErrorCode::kHashMismatch, descriptor.graph.string() + ": content hash " +
                                         actual + " does not match descriptor " +
                                         descriptor.content_hash);
    }
  }
  try {
    impl_->net = cv::dnn::readNetFromONNX(descriptor.graph.string());
    impl_->net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
    impl_->net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
  } catch (const cv::Exception& e) {
    fail(ErrorCode::kGraphExecution,
         "cannot load graph " + descriptor.graph.string() + ": " + e.what());
  }
  if (impl_->net.empty()) {
    fail(ErrorCode::kGraphExecution, "empty graph " + descriptor.graph.string());
  }
  // Probe once so a dimension mismatch surfaces at load, not mid-run.
  TensorImage probe;
  probe.height = probe.width = spec_.preprocess.crop_size;
  probe.data.assign(static_cast<size_t>(3) * probe.height * probe.width, 0.0f);
  std::vector<TensorImage> batch{probe};
  cv::Mat out;
  try {
    out = impl_->run(make_blob(batch, spec_.preprocess.crop_size));
  } catch (const cv::Exception& e) {
    fail(ErrorCode::kGraphExecution, spec_.id + ": probe forward failed: " + e.what());
  }
  if (out.total() != static_cast<size_t>(spec_.embed_dim)) {
    fail(ErrorCode::kShapeMismatch, spec_.id + ": graph emits " +
                                        std::to_string(out.total()) +
                                        " values per image, descriptor declares " +
                                        std::to_string(spec_.embed_dim));
  }
}

GraphBackbone::~GraphBackbone() = default;

FeatureVector GraphBackbone::embed(const TensorImage& img) const {
  return embed_batch(std::span<const TensorImage>(&img, 1)).front();
}

std::vector<FeatureVector> GraphBackbone::embed_batch(
    std::span<const TensorImage> images) const {
  if (images.empty()) return {};
  for (const auto& img : images) check_input(img);
  cv::Mat out;
  try {
    out = impl_->run(make_blob(images, spec_.preprocess.crop_size));
  } catch (const cv::Exception& e) {
    fail(ErrorCode::kGraphExecution, spec_.id + ": forward failed: " + e.what());
  }
  const size_t dim = static_cast<size_t>(spec_.embed_dim);
  if (out.total() != images.size() * dim || out.type() != CV_32F) {
    fail(ErrorCode::kShapeMismatch, spec_.id + ": unexpected graph output shape");
  }
  const float* src = out.ptr<float>();
  std::vector<FeatureVector> result(images.size());
  for (size_t i = 0; i < images.size(); ++i) {
    result[i].values.assign(src + i * dim, src + (i + 1) * dim);
    check_output(result[i]);
  }
  return result;
}

}  // namespace fusiondetect::backbone
