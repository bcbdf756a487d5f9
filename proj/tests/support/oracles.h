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

#ifndef FUSIONDETECT_TESTS_ORACLES_H_
#define FUSIONDETECT_TESTS_ORACLES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fusiondetect/label.h"
#include "fusiondetect/metrics.h"
#include "fusiondetect/mlp.h"

// Reference computations written independently of the library code they
// check. Shared by the unit tests and the acceptance binary.
namespace fdtest {

// Random head: depth 1..5, hidden widths 1..16, input dim 1..32.
fusiondetect::head::MlpConfig random_mlp_config(uint64_t seed);

struct GradCheck {
  double max_rel_error = 0.0;
  size_t checked = 0;
  // Parameters whose +-h step flips a ReLU unit somewhere in the batch. The
  // loss is not differentiable inside that interval, so the central
  // difference is not a valid reference there.
  size_t kink_skipped = 0;
};

// Compares backward() in double against central differences (step h) of
// mean_loss over every parameter. Relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, floor). ReLU patterns
// come from a separate plain forward pass.
GradCheck mlp_gradient_check(const fusiondetect::head::MlpConfig& config, uint64_t seed,
                             int batch_size = 4, double h = 1e-5, double floor = 1e-6);

// Precision at each positive computed by counting, without sorting: the
// rank of item i is 1 + #{j : s_j > s_i, or s_j == s_i and j < i}.
double brute_force_ap(std::span<const double> scores, std::span<const int> labels);

std::vector<fusiondetect::metrics::EvalRecord> make_records(std::span<const double> scores,
                                                            std::span<const int> labels);

// -[y log p + (1 - y) log(1 - p)] with p = 1 / (1 + e^-x), evaluated in
// quad precision so the 1 - p cancellation stays far below 1e-12.
double naive_bce(double logit, fusiondetect::Label label);

// Plain loops over the naive definitions.
double naive_mean(std::span<const double> v);
double naive_sample_std(std::span<const double> v);

// Largest relative error between kl_gradient and central differences of
// kl_divergence for a random P over n points.
double tsne_gradient_check(size_t n, uint64_t seed, double h = 1e-6);

// Three well-separated Gaussian clusters (separation 10 sigma) in `dim`
// dimensions, `per_cluster` points each. Labels 0, 1, 2.
struct Clusters {
  std::vector<double> points;
  std::vector<int> labels;
  size_t n = 0;
  size_t dim = 0;
};
Clusters gaussian_clusters(size_t per_cluster, size_t dim, uint64_t seed);

// The per-generator accuracies of the FusionDetect column of the OmniGen
// comparison, and the per-dataset accuracies and AP of the headline table.
inline constexpr double kOmniGenAccuracies[] = {97.3, 97.5, 96.4, 98.5, 99.3, 99.0,
                                                99.2, 98.4, 99.6, 97.9, 98.2, 87.5};
inline constexpr double kDatasetAccuracies[] = {83.03, 83.23, 76.32};
inline constexpr double kDatasetAps[] = {91.28, 90.91, 80.02};

}  // namespace fdtest

#endif  // FUSIONDETECT_TESTS_ORACLES_H_
