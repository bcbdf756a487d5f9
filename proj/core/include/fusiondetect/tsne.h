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

#ifndef FUSIONDETECT_TSNE_H_
#define FUSIONDETECT_TSNE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fusiondetect/fusion.h"

namespace fusiondetect::tsne {

// Exact t-SNE is O(n^2) in time and memory.
inline constexpr size_t kMaxPoints = 10000;

struct TsneConfig {
  double perplexity = 30.0;
  double learning_rate = 200.0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch = 250;
  // Per-coordinate adaptive step gains.
  bool adaptive_gains = true;
  double min_gain = 0.01;
  double init_std = 1e-4;
  uint64_t seed = 0;

  // Throws kInvalidArgument unless 4 <= n <= kMaxPoints and
  // 1 < perplexity < n - 1.
  void validate(size_t n) const;
};

// Row-major n x n squared Euclidean distances.
std::vector<double> squared_distances(std::span<const double> points, size_t n, size_t dim);

struct ConditionalAffinities {
  // Row-major n x n; each row sums to 1, zero diagonal.
  std::vector<double> p;
  std::vector<double> betas;
  // Rows whose entropy missed log2(perplexity) by more than the tolerance.
  size_t unconverged_rows = 0;
};

inline constexpr double kEntropyTolerance = 1e-5;
inline constexpr int kMaxBisectionSteps = 50;

// Per-row precision found by bisection on log(beta) so the row entropy in
// bits matches log2(perplexity).
ConditionalAffinities conditional_affinities(std::span<const double> sq_distances, size_t n,
                                             double perplexity);

// (P + P^T) / (2n).
std::vector<double> joint_affinities(std::span<const double> conditional, size_t n);

// Student-t similarities normalized to sum 1, zero diagonal.
std::vector<double> low_dim_affinities(std::span<const double> y, size_t n);

// KL(P || Q) for a 2-D embedding y (n x 2, row-major).
double kl_divergence(std::span<const double> p, std::span<const double> y, size_t n);
// Gradient of kl_divergence with respect to y.
std::vector<double> kl_gradient(std::span<const double> p, std::span<const double> y, size_t n);

struct TsneResult {
  // n x 2, row-major, centered.
  std::vector<double> embedding;
  // KL(P || Q) after each iteration, against the unexaggerated P.
  std::vector<double> kl_history;
  // Exact duplicate points that were jittered apart before fitting.
  size_t jittered_points = 0;
  size_t unconverged_rows = 0;
};

TsneResult run_tsne(std::span<const double> points, size_t n, size_t dim,
                    const TsneConfig& config);
TsneResult run_tsne(const head::FeatureMatrix& features, const TsneConfig& config);

// Assigns each point to the nearest class centroid and returns the fraction
// assigned to their own class.
double nearest_centroid_purity(std::span<const double> embedding, std::span<const int> labels);

}  // namespace fusiondetect::tsne

#endif  // FUSIONDETECT_TSNE_H_
