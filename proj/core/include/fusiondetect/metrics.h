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

#ifndef FUSIONDETECT_METRICS_H_
#define FUSIONDETECT_METRICS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fusiondetect/label.h"

namespace fusiondetect::datasets {
struct ManifestEntry;
}

namespace fusiondetect::metrics {

inline constexpr double kDefaultThreshold = 0.5;

struct EvalRecord {
  double score = 0.0;  // predicted probability of fake, in [0, 1]
  Label label = Label::kReal;
  std::string generator_id;
  std::string dataset_id;
};

// Fraction of records where (score >= threshold) == (label == fake).
// Throws kEmptyInput.
double accuracy(std::span<const EvalRecord> records, double threshold = kDefaultThreshold);

// Mean of precision@k over the ranks k of the positives, after a stable sort
// by descending score (ties keep input order). Throws kDegenerateClasses if
// either class is missing.
double average_precision(std::span<const EvalRecord> records);

struct ClassAccuracy {
  std::optional<double> real;
  std::optional<double> fake;
};

ClassAccuracy per_class_accuracy(std::span<const EvalRecord> records,
                                 double threshold = kDefaultThreshold);

struct MetricsReport {
  size_t n = 0;
  size_t n_real = 0;
  size_t n_fake = 0;
  double accuracy = 0.0;
  // Absent when the group holds a single class.
  std::optional<double> average_precision;
  std::optional<double> real_accuracy;
  std::optional<double> fake_accuracy;
};

MetricsReport evaluate(std::span<const EvalRecord> records,
                       double threshold = kDefaultThreshold);

double mean(std::span<const double> values);
// n - 1 denominator; absent for fewer than two values.
std::optional<double> sample_std(std::span<const double> values);

struct AggregateReport {
  std::map<std::string, MetricsReport> groups;
  double mean_accuracy = 0.0;
  std::optional<double> mean_ap;
  std::optional<double> std_accuracy;
  std::optional<double> std_ap;

  // Group ids ordered by ascending accuracy (ties: AP, then id).
  std::vector<std::string> rows_by_ascending_mean() const;
};

// Unweighted mean and sample STD over groups. AP statistics use the groups
// that have an AP. Throws kEmptyInput for an empty map.
AggregateReport aggregate(const std::map<std::string, MetricsReport>& groups);

enum class GroupBy { kDataset, kGenerator };
// How a dataset row is scored when grouping by dataset: pool all its records,
// or average its per-generator scores.
enum class PoolMode { kPooled, kGeneratorMean };

std::string group_by_name(GroupBy group_by);
GroupBy parse_group_by(const std::string& name);
std::string pool_mode_name(PoolMode mode);
PoolMode parse_pool_mode(const std::string& name);

// Per-group metrics. A generator group holds that generator's fakes plus the
// real records of the same dataset(s).
std::map<std::string, MetricsReport> group_metrics(std::span<const EvalRecord> records,
                                                   GroupBy group_by,
                                                   PoolMode pool_mode = PoolMode::kPooled,
                                                   double threshold = kDefaultThreshold);

struct SplitReport {
  std::vector<std::string> shared_generators;
  std::vector<std::string> shared_datasets;

  bool disjoint() const { return shared_generators.empty() && shared_datasets.empty(); }
  std::string describe() const;
};

enum class SplitMode { kStrict, kAudit };

// Compares the fake-image sides of the two manifests. Real images
// (generator "real") are ignored. In strict mode a non-disjoint result
// throws kSplitViolation; audit mode only reports.
SplitReport assert_two_axis_split(std::span<const datasets::ManifestEntry> train,
                                  std::span<const datasets::ManifestEntry> test,
                                  SplitMode mode = SplitMode::kStrict);

}  // namespace fusiondetect::metrics

#endif  // FUSIONDETECT_METRICS_H_
