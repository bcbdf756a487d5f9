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

#ifndef FUSIONDETECT_TRAINER_H_
#define FUSIONDETECT_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fusiondetect/fusion.h"
#include "fusiondetect/label.h"
#include "fusiondetect/mlp.h"
#include "fusiondetect/optimizer.h"

namespace fusiondetect::head {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 256;
  uint64_t seed = 0;
  AdamWConfig optimizer;
  // Fraction of training images perturbed while extracting train features.
  double augment_probability = 0.10;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  // Mean per-sample loss and accuracy of the predictions made while
  // training through the epoch.
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  MlpParams params;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Seeded per-epoch shuffling, mini-batch backward + AdamW step. Throws
// kEmptyClass unless both labels occur, kDivergence on a non-finite loss.
TrainResult train(const FeatureMatrix& features, std::span<const Label> labels,
                  const MlpConfig& config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch = {});

}  // namespace fusiondetect::head

#endif  // FUSIONDETECT_TRAINER_H_
