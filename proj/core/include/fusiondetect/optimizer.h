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

#ifndef FUSIONDETECT_OPTIMIZER_H_
#define FUSIONDETECT_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "fusiondetect/mlp.h"

namespace fusiondetect::head {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;

  void validate() const;
};

// AdamW with decoupled weight decay:
//   t += 1
//   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
//   theta -= lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * theta)
// where m_hat = m / (1 - b1^t), v_hat = v / (1 - b2^t). Moments are kept in
// double regardless of the parameter type.
template <typename T>
class AdamW {
 public:
  AdamW(const AdamWConfig& config, const BasicMlpParams<T>& params);

  // Throws kShapeMismatch if grads do not mirror the params seen at
  // construction.
  void step(BasicMlpParams<T>& params, const BasicMlpParams<T>& grads);

  int64_t t() const { return t_; }
  const AdamWConfig& config() const { return config_; }
  // Flattened moments in for_each_tensor order.
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

 private:
  AdamWConfig config_;
  int64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace fusiondetect::head

#endif  // FUSIONDETECT_OPTIMIZER_H_
