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

#include "oracles.h"

#include <quadmath.h>

#include <algorithm>
#include <cmath>

#include "fusiondetect/rng.h"
#include "fusiondetect/tsne.h"

namespace fdtest {

namespace fd = fusiondetect;
namespace hd = fusiondetect::head;

hd::MlpConfig random_mlp_config(uint64_t seed) {
  fd::Rng rng(seed);
  hd::MlpConfig c;
  c.input_dim = static_cast<int>(rng.uniform_int(1, 32));
  const int depth = static_cast<int>(rng.uniform_int(1, 5));
  for (int i = 0; i + 1 < depth; ++i) c.hidden_widths.push_back(static_cast<int>(rng.uniform_int(1, 16)));
  return c;
}

namespace {

// Sign of every hidden pre-activation for every example, in order.
std::vector<bool> relu_pattern(const hd::MlpParams64& params,
                               const std::vector<std::vector<double>>& inputs) {
  std::vector<bool> pattern;
  for (const auto& x : inputs) {
    std::vector<double> a = x;
    for (size_t l = 0; l + 1 < params.layers.size(); ++l) {
      const auto& layer = params.layers[l];
      std::vector<double> z(static_cast<size_t>(layer.out));
      for (int o = 0; o < layer.out; ++o) {
        double sum = layer.bias[o];
        for (int i = 0; i < layer.in; ++i) sum += layer.weight[o * layer.in + i] * a[i];
        z[o] = sum;
        pattern.push_back(sum > 0);
      }
      for (auto& v : z) v = v > 0 ? v : 0;
      a = std::move(z);
    }
  }
  return pattern;
}

}  // namespace

GradCheck mlp_gradient_check(const hd::MlpConfig& config, uint64_t seed, int batch_size, double h,
                             double floor) {
  fd::Rng rng(seed);
  hd::MlpParams64 params = hd::init_params(config, fd::derive_seed(seed, 1)).cast<double>();
  // Non-zero biases so ReLU units are not all pinned to the same side.
  for (auto& layer : params.layers) {
    for (auto& b : layer.bias) b = rng.uniform(-0.3, 0.3);
  }
  std::vector<std::vector<double>> inputs(static_cast<size_t>(batch_size));
  std::vector<hd::Example<double>> batch;
  for (int i = 0; i < batch_size; ++i) {
    inputs[i].resize(static_cast<size_t>(config.input_dim));
    for (auto& v : inputs[i]) v = rng.uniform(-2, 2);
    batch.push_back({inputs[i], i % 2 == 0 ? fd::Label::kFake : fd::Label::kReal});
  }
  hd::MlpParams64 grads;
  hd::backward<double>(params, batch, grads);

  const std::vector<bool> base_pattern = relu_pattern(params, inputs);
  GradCheck result;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    for (int which = 0; which < 2; ++which) {
      auto& values = which == 0 ? params.layers[l].weight : params.layers[l].bias;
      const auto& analytic = which == 0 ? grads.layers[l].weight : grads.layers[l].bias;
      for (size_t k = 0; k < values.size(); ++k) {
        const double saved = values[k];
        values[k] = saved + h;
        const double up = hd::mean_loss<double>(params, batch);
        const bool kink_up = relu_pattern(params, inputs) != base_pattern;
        values[k] = saved - h;
        const double down = hd::mean_loss<double>(params, batch);
        const bool kink_down = relu_pattern(params, inputs) != base_pattern;
        values[k] = saved;
        if (kink_up || kink_down) {
          ++result.kink_skipped;
          continue;
        }
        const double numeric = (up - down) / (2 * h);
        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), floor});
        result.max_rel_error = std::max(result.max_rel_error, std::abs(analytic[k] - numeric) / denom);
        ++result.checked;
      }
    }
  }
  return result;
}

double brute_force_ap(std::span<const double> scores, std::span<const int> labels) {
  const size_t n = scores.size();
  double positives = 0, sum = 0;
  for (size_t i = 0; i < n; ++i) {
    if (labels[i] != 1) continue;
    positives += 1;
    double rank = 1, hits = 1;
    for (size_t j = 0; j < n; ++j) {
      const bool ahead = scores[j] > scores[i] || (scores[j] == scores[i] && j < i);
      if (ahead) {
        rank += 1;
        if (labels[j] == 1) hits += 1;
      }
    }
    sum += hits / rank;
  }
  return sum / positives;
}

std::vector<fd::metrics::EvalRecord> make_records(std::span<const double> scores,
                                                  std::span<const int> labels) {
  std::vector<fd::metrics::EvalRecord> out;
  for (size_t i = 0; i < scores.size(); ++i) {
    fd::metrics::EvalRecord r;
    r.score = scores[i];
    r.label = labels[i] == 1 ? fd::Label::kFake : fd::Label::kReal;
    r.generator_id = labels[i] == 1 ? "gen" : "real";
    r.dataset_id = "ds";
    out.push_back(r);
  }
  return out;
}

double naive_bce(double logit, fd::Label label) {
  const __float128 x = logit;
  const __float128 p = 1 / (1 + expq(-x));
  const __float128 y = label == fd::Label::kFake ? 1 : 0;
  const __float128 lp = y > 0 ? logq(p) : 0;
  const __float128 lq = y > 0 ? 0 : logq(1 - p);
  return static_cast<double>(-(y * lp + (1 - y) * lq));
}

double naive_mean(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double naive_sample_std(std::span<const double> v) {
  const double m = naive_mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double tsne_gradient_check(size_t n, uint64_t seed, double h) {
  fd::Rng rng(seed);
  std::vector<double> p(n * n, 0.0);
  double total = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double v = rng.uniform(0.1, 1.0);
      p[i * n + j] = p[j * n + i] = v;
      total += 2 * v;
    }
  }
  for (double& v : p) v /= total;
  std::vector<double> y(2 * n);
  for (double& v : y) v = rng.normal();
  const auto grad = fd::tsne::kl_gradient(p, y, n);
  double worst = 0;
  for (size_t k = 0; k < y.size(); ++k) {
    const double saved = y[k];
    y[k] = saved + h;
    const double up = fd::tsne::kl_divergence(p, y, n);
    y[k] = saved - h;
    const double down = fd::tsne::kl_divergence(p, y, n);
    y[k] = saved;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(grad[k]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(grad[k] - numeric) / denom);
  }
  return worst;
}

Clusters gaussian_clusters(size_t per_cluster, size_t dim, uint64_t seed) {
  fd::Rng rng(seed);
  Clusters c;
  c.n = 3 * per_cluster;
  c.dim = dim;
  std::vector<std::vector<double>> centers(3, std::vector<double>(dim, 0.0));
  // Orthogonal centers 10 / sqrt(2) from the origin, so pairs sit 10 sigma apart.
  for (size_t k = 0; k < 3; ++k) centers[k][k] = 10.0 / std::sqrt(2.0);
  for (size_t k = 0; k < 3; ++k) {
    for (size_t i = 0; i < per_cluster; ++i) {
      for (size_t d = 0; d < dim; ++d) c.points.push_back(centers[k][d] + rng.normal());
      c.labels.push_back(static_cast<int>(k));
    }
  }
  return c;
}

}  // namespace fdtest
