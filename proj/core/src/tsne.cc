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

#include "fusiondetect/tsne.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "fusiondetect/error.h"
#include "fusiondetect/parallel.h"
#include "fusiondetect/rng.h"

namespace fusiondetect::tsne {
namespace {

constexpr double kLogBetaLo = -100.0;
constexpr double kLogBetaHi = 100.0;
constexpr double kJitter = 1e-10;

// Row entropy in bits and the normalized row for a given beta. Distances are
// shifted by the row minimum so the largest weight is exp(0).
double row_entropy(std::span<const double> d2, size_t i, double beta, double d_min,
                   std::span<double> row) {
  double sum = 0.0;
  for (size_t j = 0; j < d2.size(); ++j) {
    row[j] = j == i ? 0.0 : std::exp(-(d2[j] - d_min) * beta);
    sum += row[j];
  }
  double weighted = 0.0;
  for (size_t j = 0; j < d2.size(); ++j) {
    row[j] /= sum;
    weighted += row[j] * (d2[j] - d_min);
  }
  return (std::log(sum) + beta * weighted) / std::log(2.0);
}

size_t jitter_duplicates(std::vector<double>& points, size_t n, size_t dim, uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6a6974ULL));
  size_t jittered = 0;
  for (size_t i = 1; i < n; ++i) {
    const double* xi = &points[i * dim];
    bool duplicate = false;
    for (size_t j = 0; j < i && !duplicate; ++j) {
      duplicate = std::equal(xi, xi + dim, &points[j * dim]);
    }
    if (!duplicate) continue;
    for (size_t k = 0; k < dim; ++k) {
      double& x = points[i * dim + k];
      x += rng.uniform(-kJitter, kJitter) * std::max(1.0, std::abs(x));
    }
    ++jittered;
  }
  return jittered;
}

}  // namespace

void TsneConfig::validate(size_t n) const {
  if (n < 4) fail(ErrorCode::kInvalidArgument, "t-SNE needs at least 4 points");
  if (n > kMaxPoints) {
    fail(ErrorCode::kInvalidArgument, "exact t-SNE is capped at " + std::to_string(kMaxPoints) +
                                          " points, got " + std::to_string(n));
  }
  if (!(perplexity > 1.0) || !(perplexity < static_cast<double>(n) - 1.0)) {
    fail(ErrorCode::kInvalidArgument, "perplexity must lie in (1, n - 1) = (1, " +
                                          std::to_string(n - 1) + ")");
  }
  if (iterations < 1) fail(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorCode::kInvalidArgument, "learning_rate must be > 0");
  if (!(early_exaggeration >= 1.0) || exaggeration_iterations < 0 || momentum_switch < 0) {
    fail(ErrorCode::kInvalidArgument, "invalid exaggeration or momentum schedule");
  }
  if (!(init_std > 0.0) || !(min_gain > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "init_std and min_gain must be > 0");
  }
}

std::vector<double> squared_distances(std::span<const double> points, size_t n, size_t dim) {
  if (points.size() != n * dim) fail(ErrorCode::kShapeMismatch, "points size != n * dim");
  std::vector<double> d2(n * n, 0.0);
  parallel_for(n, [&](size_t i) {
    const double* xi = &points[i * dim];
    for (size_t j = 0; j < n; ++j) {
      const double* xj = &points[j * dim];
      double s = 0.0;
      for (size_t k = 0; k < dim; ++k) {
        const double d = xi[k] - xj[k];
        s += d * d;
      }
      d2[i * n + j] = s;
    }
  });
  for (double v : d2) {
    if (!std::isfinite(v)) fail(ErrorCode::kDegenerateInput, "non-finite pairwise distance");
  }
  return d2;
}

ConditionalAffinities conditional_affinities(std::span<const double> sq_distances, size_t n,
                                             double perplexity) {
  if (sq_distances.size() != n * n) fail(ErrorCode::kShapeMismatch, "distance matrix is not n x n");
  const double target = std::log2(perplexity);
  ConditionalAffinities out;
  out.p.assign(n * n, 0.0);
  out.betas.assign(n, 1.0);
  std::vector<char> converged(n, 0);
  parallel_for(n, [&](size_t i) {
    const auto d2 = sq_distances.subspan(i * n, n);
    const auto row = std::span<double>(out.p).subspan(i * n, n);
    double d_min = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < n; ++j) {
      if (j != i) d_min = std::min(d_min, d2[j]);
    }
    double lo = kLogBetaLo;
    double hi = kLogBetaHi;
    double log_beta = 0.0;
    double best_gap = std::numeric_limits<double>::infinity();
    double best_log_beta = log_beta;
    for (int step = 0; step < kMaxBisectionSteps; ++step) {
      const double h = row_entropy(d2, i, std::exp(log_beta), d_min, row);
      const double gap = h - target;
      if (std::abs(gap) < best_gap) {
        best_gap = std::abs(gap);
        best_log_beta = log_beta;
      }
      if (std::abs(gap) < kEntropyTolerance) break;
      // Entropy falls as beta grows.
      if (gap > 0.0) {
        lo = log_beta;
      } else {
        hi = log_beta;
      }
      log_beta = 0.5 * (lo + hi);
    }
    row_entropy(d2, i, std::exp(best_log_beta), d_min, row);
    out.betas[i] = std::exp(best_log_beta);
    converged[i] = best_gap < kEntropyTolerance ? 1 : 0;
  });
  for (char c : converged) out.unconverged_rows += c ? 0 : 1;
  return out;
}

std::vector<double> joint_affinities(std::span<const double> conditional, size_t n) {
  if (conditional.size() != n * n) fail(ErrorCode::kShapeMismatch, "affinities are not n x n");
  std::vector<double> p(n * n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      p[i * n + j] = (conditional[i * n + j] + conditional[j * n + i]) * scale;
    }
  }
  return p;
}

namespace {

// Unnormalized Student-t kernel and its total, summed in row order.
double student_t(std::span<const double> y, size_t n, std::vector<double>& num) {
  num.assign(n * n, 0.0);
  std::vector<double> row_sums(n, 0.0);
  parallel_for(n, [&](size_t i) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      num[i * n + j] = 1.0 / (1.0 + dx * dx + dy * dy);
      s += num[i * n + j];
    }
    row_sums[i] = s;
  });
  double total = 0.0;
  for (double s : row_sums) total += s;
  return total;
}

void gradient_into(std::span<const double> p, double p_scale, std::span<const double> y,
                   size_t n, const std::vector<double>& num, double total,
                   std::vector<double>& grad) {
  grad.assign(2 * n, 0.0);
  parallel_for(n, [&](size_t i) {
    double gx = 0.0;
    double gy = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = num[i * n + j];
      const double coeff = (p_scale * p[i * n + j] - w / total) * w;
      gx += coeff * (y[2 * i] - y[2 * j]);
      gy += coeff * (y[2 * i + 1] - y[2 * j + 1]);
    }
    grad[2 * i] = 4.0 * gx;
    grad[2 * i + 1] = 4.0 * gy;
  });
}

double kl_from(std::span<const double> p, size_t n, const std::vector<double>& num,
               double total) {
  std::vector<double> row_kl(n, 0.0);
  parallel_for(n, [&](size_t i) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double pij = p[i * n + j];
      if (j == i || pij <= 0.0) continue;
      s += pij * std::log(pij / (num[i * n + j] / total));
    }
    row_kl[i] = s;
  });
  double kl = 0.0;
  for (double s : row_kl) kl += s;
  return kl;
}

void check_embedding(std::span<const double> p, std::span<const double> y, size_t n) {
  if (p.size() != n * n || y.size() != 2 * n) {
    fail(ErrorCode::kShapeMismatch, "P must be n x n and y n x 2");
  }
}

}  // namespace

std::vector<double> low_dim_affinities(std::span<const double> y, size_t n) {
  if (y.size() != 2 * n) fail(ErrorCode::kShapeMismatch, "y must be n x 2");
  std::vector<double> num;
  const double total = student_t(y, n, num);
  for (double& v : num) v /= total;
  return num;
}

double kl_divergence(std::span<const double> p, std::span<const double> y, size_t n) {
  check_embedding(p, y, n);
  std::vector<double> num;
  const double total = student_t(y, n, num);
  return kl_from(p, n, num, total);
}

std::vector<double> kl_gradient(std::span<const double> p, std::span<const double> y,
                                size_t n) {
  check_embedding(p, y, n);
  std::vector<double> num;
  const double total = student_t(y, n, num);
  std::vector<double> grad;
  gradient_into(p, 1.0, y, n, num, total, grad);
  return grad;
}

TsneResult run_tsne(std::span<const double> points, size_t n, size_t dim,
                    const TsneConfig& config) {
  config.validate(n);
  if (dim == 0 || points.size() != n * dim) {
    fail(ErrorCode::kShapeMismatch, "points size != n * dim");
  }
  TsneResult result;
  std::vector<double> x(points.begin(), points.end());
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::kDegenerateInput, "non-finite input coordinate");
  }
  result.jittered_points = jitter_duplicates(x, n, dim, config.seed);

  const std::vector<double> d2 = squared_distances(x, n, dim);
  const ConditionalAffinities cond = conditional_affinities(d2, n, config.perplexity);
  result.unconverged_rows = cond.unconverged_rows;
  const std::vector<double> p = joint_affinities(cond.p, n);

  Rng rng(derive_seed(config.seed, 1));
  std::vector<double> y(2 * n);
  for (double& v : y) v = rng.normal() * config.init_std;
  std::vector<double> velocity(2 * n, 0.0);
  std::vector<double> gains(2 * n, 1.0);
  std::vector<double> num;
  std::vector<double> grad;
  result.kl_history.reserve(static_cast<size_t>(config.iterations));

  for (int it = 0; it < config.iterations; ++it) {
    const double exaggeration =
        it < config.exaggeration_iterations ? config.early_exaggeration : 1.0;
    const double momentum =
        it < config.momentum_switch ? config.initial_momentum : config.final_momentum;
    const double total = student_t(y, n, num);
    gradient_into(p, exaggeration, y, n, num, total, grad);
    for (size_t k = 0; k < grad.size(); ++k) {
      if (!std::isfinite(grad[k])) {
        fail(ErrorCode::kNonFiniteGradient,
             "non-finite t-SNE gradient at iteration " + std::to_string(it));
      }
    }
    for (size_t k = 0; k < y.size(); ++k) {
      if (config.adaptive_gains) {
        const bool same_sign = (grad[k] > 0.0) == (velocity[k] > 0.0);
        gains[k] = same_sign ? gains[k] * 0.8 : gains[k] + 0.2;
        gains[k] = std::max(gains[k], config.min_gain);
      }
      velocity[k] = momentum * velocity[k] - config.learning_rate * gains[k] * grad[k];
      y[k] += velocity[k];
    }
    double mx = 0.0;
    double my = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
    const double new_total = student_t(y, n, num);
    result.kl_history.push_back(kl_from(p, n, num, new_total));
  }
  result.embedding = std::move(y);
  return result;
}

TsneResult run_tsne(const head::FeatureMatrix& features, const TsneConfig& config) {
  std::vector<double> points(features.values.begin(), features.values.end());
  return run_tsne(points, features.rows(), features.dim, config);
}

double nearest_centroid_purity(std::span<const double> embedding, std::span<const int> labels) {
  const size_t n = labels.size();
  if (n == 0 || embedding.size() != 2 * n) {
    fail(ErrorCode::kShapeMismatch, "embedding must be n x 2 with one label per point");
  }
  std::map<int, std::array<double, 3>> acc;
  for (size_t i = 0; i < n; ++i) {
    auto& a = acc[labels[i]];
    a[0] += embedding[2 * i];
    a[1] += embedding[2 * i + 1];
    a[2] += 1.0;
  }
  size_t hits = 0;
  for (size_t i = 0; i < n; ++i) {
    int best = labels[i];
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [label, a] : acc) {
      const double dx = embedding[2 * i] - a[0] / a[2];
      const double dy = embedding[2 * i + 1] - a[1] / a[2];
      const double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = label;
      }
    }
    hits += best == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace fusiondetect::tsne
