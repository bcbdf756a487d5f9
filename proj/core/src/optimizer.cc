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

#include "fusiondetect/optimizer.h"

#include <cmath>

#include "fusiondetect/error.h"

namespace fusiondetect::head {

void AdamWConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) fail(ErrorCode::kInvalidArgument, "lr must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "AdamW betas must be in [0,1)");
  }
  if (!(eps > 0.0)) fail(ErrorCode::kInvalidArgument, "AdamW eps must be > 0");
  if (!(weight_decay >= 0.0)) fail(ErrorCode::kInvalidArgument, "weight_decay must be >= 0");
}

template <typename T>
AdamW<T>::AdamW(const AdamWConfig& config, const BasicMlpParams<T>& params)
    : config_(config) {
  config_.validate();
  const size_t n = params.parameter_count();
  m_.assign(n, 0.0);
  v_.assign(n, 0.0);
}

template <typename T>
void AdamW<T>::step(BasicMlpParams<T>& params, const BasicMlpParams<T>& grads) {
  if (params.parameter_count() != m_.size() || grads.parameter_count() != m_.size() ||
      grads.layers.size() != params.layers.size()) {
    fail(ErrorCode::kShapeMismatch, "AdamW: gradient shapes do not mirror parameters");
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  size_t k = 0;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    const auto& g = grads.layers[l];
    if (g.weight.size() != layer.weight.size() || g.bias.size() != layer.bias.size()) {
      fail(ErrorCode::kShapeMismatch, "AdamW: gradient shapes do not mirror parameters");
    }
    auto update = [&](std::vector<T>& theta, const std::vector<T>& grad) {
      for (size_t i = 0; i < theta.size(); ++i, ++k) {
        const double gi = static_cast<double>(grad[i]);
        m_[k] = b1 * m_[k] + (1.0 - b1) * gi;
        v_[k] = b2 * v_[k] + (1.0 - b2) * gi * gi;
        const double m_hat = m_[k] / bias1;
        const double v_hat = v_[k] / bias2;
        const double th = static_cast<double>(theta[i]);
        theta[i] = static_cast<T>(
            th - config_.lr * (m_hat / (std::sqrt(v_hat) + config_.eps) +
                               config_.weight_decay * th));
      }
    };
    update(layer.weight, g.weight);
    update(layer.bias, g.bias);
  }
}

template class AdamW<float>;
template class AdamW<double>;

}  // namespace fusiondetect::head
