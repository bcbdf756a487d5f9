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

#include "fusiondetect/trainer.h"

#include <cmath>
#include <numeric>
#include <string>

#include "fusiondetect/error.h"
#include "fusiondetect/rng.h"

namespace fusiondetect::head {

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (!(augment_probability >= 0.0 && augment_probability <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "augment_probability must be in [0,1]");
  }
  optimizer.validate();
}

TrainResult train(const FeatureMatrix& features, std::span<const Label> labels,
                  const MlpConfig& config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch) {
  train_config.validate();
  config.validate();
  const size_t n = features.rows();
  if (labels.size() != n) {
    fail(ErrorCode::kShapeMismatch, "train: " + std::to_string(labels.size()) +
                                        " labels for " + std::to_string(n) + " rows");
  }
  if (features.dim != static_cast<size_t>(config.input_dim)) {
    fail(ErrorCode::kShapeMismatch, "train: feature dim " + std::to_string(features.dim) +
                                        " != MLP input dim " +
                                        std::to_string(config.input_dim));
  }
  size_t n_fake = 0;
  for (Label l : labels) n_fake += l == Label::kFake ? 1 : 0;
  if (n_fake == 0 || n_fake == n) {
    fail(ErrorCode::kEmptyClass, "training set needs at least one real and one fake sample");
  }

  TrainResult result;
  result.params = init_params(config, derive_seed(train_config.seed, 1));
  AdamW<float> optimizer(train_config.optimizer, result.params);
  MlpParams grads = MlpParams::zeros(config);
  Rng shuffle_rng(derive_seed(train_config.seed, 2));

  std::vector<size_t> order(n);
  std::vector<Example<float>> batch;
  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    double loss_sum = 0.0;
    size_t correct = 0;
    for (size_t start = 0; start < n; start += train_config.batch_size) {
      const size_t end = std::min(n, start + static_cast<size_t>(train_config.batch_size));
      batch.clear();
      double loss = 0.0;
      try {
        for (size_t i = start; i < end; ++i) {
          const size_t row = order[i];
          const Example<float> ex{features.row(row), labels[row]};
          batch.push_back(ex);
          const double p = predict_proba(result.params, ex.features);
          correct += ((p >= 0.5) == (ex.label == Label::kFake)) ? 1 : 0;
        }
        loss = backward<float>(result.params, batch, grads);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNonFinite) throw;
        fail(ErrorCode::kDivergence, "non-finite logit at epoch " + std::to_string(epoch) +
                                         ", batch starting at " + std::to_string(start));
      }
      if (!std::isfinite(loss)) {
        fail(ErrorCode::kDivergence, "non-finite loss at epoch " + std::to_string(epoch) +
                                         ", batch starting at " + std::to_string(start));
      }
      loss_sum += loss * static_cast<double>(end - start);
      optimizer.step(result.params, grads);
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(n),
                     static_cast<double>(correct) / static_cast<double>(n)};
    if (!std::isfinite(stats.mean_loss)) {
      fail(ErrorCode::kDivergence, "non-finite epoch loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

}  // namespace fusiondetect::head
