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

#include "fusiondetect/mlp.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fusiondetect/error.h"
#include "fusiondetect/rng.h"

namespace fusiondetect::head {

void MlpConfig::validate() const {
  if (input_dim < 1) fail(ErrorCode::kInvalidArgument, "MLP input_dim must be >= 1");
  if (depth() < kMinDepth || depth() > kMaxDepth) {
    fail(ErrorCode::kInvalidArgument,
         "MLP depth must be in [1,5], got " + std::to_string(depth()));
  }
  for (int w : hidden_widths) {
    if (w < 1) fail(ErrorCode::kInvalidArgument, "MLP hidden widths must be >= 1");
  }
}

MlpConfig MlpConfig::with_depth(int input_dim, int depth) {
  static constexpr int kTaper[] = {1024, 256, 64, 16};
  if (depth < kMinDepth || depth > kMaxDepth) {
    fail(ErrorCode::kInvalidArgument, "MLP depth must be in [1,5], got " + std::to_string(depth));
  }
  MlpConfig config;
  config.input_dim = input_dim;
  config.hidden_widths.assign(kTaper, kTaper + depth - 1);
  config.validate();
  return config;
}

std::string MlpConfig::describe() const {
  std::ostringstream os;
  os << input_dim;
  for (int w : hidden_widths) os << "-" << w;
  os << "-1";
  return os.str();
}

template <typename T>
BasicMlpParams<T> BasicMlpParams<T>::zeros(const MlpConfig& config) {
  config.validate();
  BasicMlpParams<T> params;
  params.config = config;
  int in = config.input_dim;
  std::vector<int> outs = config.hidden_widths;
  outs.push_back(1);
  for (int out : outs) {
    DenseLayer<T> layer;
    layer.in = in;
    layer.out = out;
    layer.weight.assign(static_cast<size_t>(in) * out, T{0});
    layer.bias.assign(out, T{0});
    params.layers.push_back(std::move(layer));
    in = out;
  }
  return params;
}

template <typename T>
size_t BasicMlpParams<T>::parameter_count() const {
  size_t n = 0;
  for (const auto& layer : layers) n += layer.weight.size() + layer.bias.size();
  return n;
}

MlpParams init_params(const MlpConfig& config, uint64_t seed) {
  MlpParams params = MlpParams::zeros(config);
  Rng rng(seed);
  for (auto& layer : params.layers) {
    const double bound = std::sqrt(6.0 / layer.in);
    for (float& w : layer.weight) w = static_cast<float>(rng.uniform(-bound, bound));
  }
  return params;
}

namespace {

template <typename T>
void check_input(const BasicMlpParams<T>& params, size_t dim) {
  if (params.layers.empty()) fail(ErrorCode::kInvalidArgument, "MLP has no layers");
  if (dim != static_cast<size_t>(params.layers.front().in)) {
    fail(ErrorCode::kShapeMismatch, "MLP expects input dim " +
                                        std::to_string(params.layers.front().in) +
                                        ", got " + std::to_string(dim));
  }
}

// Writes the pre-activation of `layer` applied to `in` into `out`.
template <typename T>
void affine(const DenseLayer<T>& layer, const T* in, T* out) {
  constexpr int kLanes = 8;
  for (int o = 0; o < layer.out; ++o) {
    const T* w = &layer.weight[static_cast<size_t>(o) * layer.in];
    // Eight fixed-order partial sums.
    T lanes[kLanes] = {};
    int i = 0;
    for (; i + kLanes <= layer.in; i += kLanes) {
      for (int k = 0; k < kLanes; ++k) lanes[k] += w[i + k] * in[i + k];
    }
    T acc = layer.bias[o];
    for (; i < layer.in; ++i) acc += w[i] * in[i];
    for (int k = 0; k < kLanes; ++k) acc += lanes[k];
    out[o] = acc;
  }
}

// Post-activation values of every layer, activations[0] being the input.
template <typename T>
struct Trace {
  std::vector<std::vector<T>> activations;
  T logit{};
};

template <typename T>
void run_forward(const BasicMlpParams<T>& params, std::span<const T> z, Trace<T>& trace) {
  const size_t n_layers = params.layers.size();
  trace.activations.resize(n_layers);
  trace.activations[0].assign(z.begin(), z.end());
  for (size_t l = 0; l < n_layers; ++l) {
    const auto& layer = params.layers[l];
    if (l + 1 < n_layers) {
      auto& next = trace.activations[l + 1];
      next.resize(layer.out);
      affine(layer, trace.activations[l].data(), next.data());
      for (T& v : next) v = v > T{0} ? v : T{0};
    } else {
      affine(layer, trace.activations[l].data(), &trace.logit);
    }
  }
}

}  // namespace

template <typename T>
T forward(const BasicMlpParams<T>& params, std::span<const T> z) {
  check_input(params, z.size());
  Trace<T> trace;
  run_forward(params, z, trace);
  return trace.logit;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_with_logits(double logit, Label label) {
  if (!std::isfinite(logit)) fail(ErrorCode::kNonFinite, "bce_with_logits: non-finite logit");
  const double y = label == Label::kFake ? 1.0 : 0.0;
  return std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::fabs(logit)));
}

template <typename T>
double backward(const BasicMlpParams<T>& params, std::span<const Example<T>> batch,
                BasicMlpParams<T>& grads) {
  if (batch.empty()) fail(ErrorCode::kEmptyInput, "backward: empty batch");
  if (grads.layers.size() != params.layers.size()) {
    grads = BasicMlpParams<T>::zeros(params.config);
  } else {
    grads.config = params.config;
    grads.for_each_tensor([](std::span<T> t) { std::fill(t.begin(), t.end(), T{0}); });
  }
  const size_t n_layers = params.layers.size();
  const size_t n = batch.size();
  const T inv_n = T{1} / static_cast<T>(n);
  std::vector<Trace<T>> traces(n);
  // delta[b]: d(mean loss)/d(pre-activation) of the current layer for sample b.
  std::vector<std::vector<T>> delta(n), prev_delta(n);
  double loss_sum = 0.0;
  for (size_t b = 0; b < n; ++b) {
    const auto& example = batch[b];
    check_input(params, example.features.size());
    run_forward(params, example.features, traces[b]);
    const double logit = static_cast<double>(traces[b].logit);
    loss_sum += bce_with_logits(logit, example.label);
    const double y = example.label == Label::kFake ? 1.0 : 0.0;
    delta[b].assign(1, static_cast<T>(sigmoid(logit) - y) * inv_n);
  }
  // Layer-major over the batch; accumulators sum samples in batch order.
  for (size_t l = n_layers; l-- > 0;) {
    const auto& layer = params.layers[l];
    auto& g = grads.layers[l];
    for (int o = 0; o < layer.out; ++o) {
      T* gw = &g.weight[static_cast<size_t>(o) * layer.in];
      for (size_t b = 0; b < n; ++b) {
        const T d = delta[b][o];
        if (d == T{0}) continue;
        g.bias[o] += d;
        const T* input = traces[b].activations[l].data();
        for (int i = 0; i < layer.in; ++i) gw[i] += d * input[i];
      }
    }
    if (l == 0) break;
    for (size_t b = 0; b < n; ++b) prev_delta[b].assign(layer.in, T{0});
    for (int o = 0; o < layer.out; ++o) {
      const T* w = &layer.weight[static_cast<size_t>(o) * layer.in];
      for (size_t b = 0; b < n; ++b) {
        const T d = delta[b][o];
        if (d == T{0}) continue;
        T* pd = prev_delta[b].data();
        for (int i = 0; i < layer.in; ++i) pd[i] += d * w[i];
      }
    }
    for (size_t b = 0; b < n; ++b) {
      // ReLU derivative, taken as 0 at the kink.
      const auto& input = traces[b].activations[l];
      for (int i = 0; i < layer.in; ++i) {
        if (!(input[i] > T{0})) prev_delta[b][i] = T{0};
      }
    }
    delta.swap(prev_delta);
  }
  return loss_sum / static_cast<double>(batch.size());
}

template <typename T>
double mean_loss(const BasicMlpParams<T>& params, std::span<const Example<T>> batch) {
  if (batch.empty()) fail(ErrorCode::kEmptyInput, "mean_loss: empty batch");
  double sum = 0.0;
  for (const auto& example : batch) {
    sum += bce_with_logits(static_cast<double>(forward(params, example.features)),
                           example.label);
  }
  return sum / static_cast<double>(batch.size());
}

template struct BasicMlpParams<float>;
template struct BasicMlpParams<double>;
template float forward(const BasicMlpParams<float>&, std::span<const float>);
template double forward(const BasicMlpParams<double>&, std::span<const double>);
template double backward(const BasicMlpParams<float>&, std::span<const Example<float>>,
                         BasicMlpParams<float>&);
template double backward(const BasicMlpParams<double>&, std::span<const Example<double>>,
                         BasicMlpParams<double>&);
template double mean_loss(const BasicMlpParams<float>&, std::span<const Example<float>>);
template double mean_loss(const BasicMlpParams<double>&, std::span<const Example<double>>);

}  // namespace fusiondetect::head
