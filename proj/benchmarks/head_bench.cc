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

#include <vector>

#include <benchmark/benchmark.h>

#include "fusiondetect/mlp.h"
#include "fusiondetect/rng.h"

namespace hd = fusiondetect::head;

namespace {

// Fused width of the reference backbones.
constexpr int kInputDim = 768 + 1024;

std::vector<float> random_features(size_t n, uint64_t seed) {
  fusiondetect::Rng rng(seed);
  std::vector<float> out(n);
  for (auto& v : out) v = static_cast<float>(rng.normal());
  return out;
}

void BM_Forward(benchmark::State& state) {
  const auto params = hd::init_params(hd::MlpConfig::with_depth(kInputDim, static_cast<int>(state.range(0))), 1);
  const auto z = random_features(kInputDim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hd::forward<float>(params, z));
}
BENCHMARK(BM_Forward)->DenseRange(1, 5);

void BM_BackwardBatch(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const auto params = hd::init_params(hd::MlpConfig::with_depth(kInputDim, 4), 1);
  const auto data = random_features(static_cast<size_t>(batch) * kInputDim, 3);
  std::vector<hd::Example<float>> examples;
  for (int i = 0; i < batch; ++i) {
    examples.push_back({std::span<const float>(data).subspan(static_cast<size_t>(i) * kInputDim, kInputDim),
                        i % 2 ? fusiondetect::Label::kFake : fusiondetect::Label::kReal});
  }
  hd::MlpParams grads;
  for (auto _ : state) benchmark::DoNotOptimize(hd::backward<float>(params, examples, grads));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_BackwardBatch)->Arg(32)->Arg(256);

}  // namespace
