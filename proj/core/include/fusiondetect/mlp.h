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

#ifndef FUSIONDETECT_MLP_H_
#define FUSIONDETECT_MLP_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fusiondetect/label.h"

namespace fusiondetect::head {

enum class Activation : uint8_t { kRelu = 0 };

inline constexpr int kMinDepth = 1;
inline constexpr int kMaxDepth = 5;

// Classifier head: affine layers with ReLU between them and a single output
// logit. depth() counts affine layers, so hidden_widths.size() == depth - 1.
struct MlpConfig {
  int input_dim = 0;
  std::vector<int> hidden_widths;
  Activation activation = Activation::kRelu;

  int depth() const { return static_cast<int>(hidden_widths.size()) + 1; }
  void validate() const;

  // Default tapered widths: the first depth - 1 of {1024, 256, 64, 16}.
  static MlpConfig with_depth(int input_dim, int depth);

  std::string describe() const;

  friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

template <typename T>
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<T> weight;  // out x in, row-major
  std::vector<T> bias;    // out
};

template <typename T>
struct BasicMlpParams {
  MlpConfig config;
  std::vector<DenseLayer<T>> layers;

  static BasicMlpParams zeros(const MlpConfig& config);

  size_t parameter_count() const;

  template <typename U>
  BasicMlpParams<U> cast() const {
    BasicMlpParams<U> out;
    out.config = config;
    for (const auto& layer : layers) {
      DenseLayer<U> l;
      l.in = layer.in;
      l.out = layer.out;
      l.weight.assign(layer.weight.begin(), layer.weight.end());
      l.bias.assign(layer.bias.begin(), layer.bias.end());
      out.layers.push_back(std::move(l));
    }
    return out;
  }

  // Visits every parameter tensor (weights then bias, layer by layer).
  template <typename F>
  void for_each_tensor(F&& f) {
    for (auto& layer : layers) {
      f(std::span<T>(layer.weight));
      f(std::span<T>(layer.bias));
    }
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    for (const auto& layer : layers) {
      f(std::span<const T>(layer.weight));
      f(std::span<const T>(layer.bias));
    }
  }
};

using MlpParams = BasicMlpParams<float>;
// Double-precision mirror used for gradient checks.
using MlpParams64 = BasicMlpParams<double>;

// He-style uniform init, U(-sqrt(6 / fan_in), sqrt(6 / fan_in)); zero biases.
MlpParams init_params(const MlpConfig& config, uint64_t seed);

// Output logit (no final activation). Throws kShapeMismatch on a wrong input
// length.
template <typename T>
T forward(const BasicMlpParams<T>& params, std::span<const T> z);

// Overflow-safe logistic function.
double sigmoid(double x);

template <typename T>
double predict_proba(const BasicMlpParams<T>& params, std::span<const T> z) {
  return sigmoid(static_cast<double>(forward(params, z)));
}

// max(x, 0) - x*y + log(1 + exp(-|x|)). Throws kNonFinite for NaN/Inf logits.
double bce_with_logits(double logit, Label label);

template <typename T>
struct Example {
  std::span<const T> features;
  Label label;
};

// Reverse-mode gradient of the mean BCE over the batch, written into
// `grads` (reshaped to match params). Returns the mean loss.
template <typename T>
double backward(const BasicMlpParams<T>& params, std::span<const Example<T>> batch,
                BasicMlpParams<T>& grads);

// Mean BCE over the batch without gradients.
template <typename T>
double mean_loss(const BasicMlpParams<T>& params, std::span<const Example<T>> batch);

}  // namespace fusiondetect::head

#endif  // FUSIONDETECT_MLP_H_
