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

#include "fusiondetect/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "fusiondetect/error.h"
#include "fusiondetect/manifest.h"

namespace fusiondetect::metrics {
namespace {

bool predicts_fake(double score, double threshold) { return score >= threshold; }

bool is_correct(const EvalRecord& r, double threshold) {
  return predicts_fake(r.score, threshold) == (r.label == Label::kFake);
}

void check_scores(std::span<const EvalRecord> records) {
  for (const auto& r : records) {
    if (!std::isfinite(r.score) || r.score < 0.0 || r.score > 1.0) {
      fail(ErrorCode::kInvalidArgument, "eval score must be finite and in [0,1]");
    }
  }
}

}  // namespace

double accuracy(std::span<const EvalRecord> records, double threshold) {
  if (records.empty()) fail(ErrorCode::kEmptyInput, "accuracy: no records");
  check_scores(records);
  size_t correct = 0;
  for (const auto& r : records) correct += is_correct(r, threshold) ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

double average_precision(std::span<const EvalRecord> records) {
  check_scores(records);
  size_t positives = 0;
  for (const auto& r : records) positives += r.label == Label::kFake ? 1 : 0;
  if (positives == 0 || positives == records.size()) {
    fail(ErrorCode::kDegenerateClasses, "average precision needs both real and fake records");
  }
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return records[a].score > records[b].score;
  });
  double sum = 0.0;
  size_t hits = 0;
  for (size_t rank = 0; rank < order.size(); ++rank) {
    if (records[order[rank]].label == Label::kFake) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return sum / static_cast<double>(positives);
}

ClassAccuracy per_class_accuracy(std::span<const EvalRecord> records, double threshold) {
  if (records.empty()) fail(ErrorCode::kEmptyInput, "per_class_accuracy: no records");
  check_scores(records);
  size_t n[2] = {0, 0};
  size_t correct[2] = {0, 0};
  for (const auto& r : records) {
    const int k = label_value(r.label);
    ++n[k];
    correct[k] += is_correct(r, threshold) ? 1 : 0;
  }
  ClassAccuracy out;
  if (n[0] > 0) out.real = static_cast<double>(correct[0]) / static_cast<double>(n[0]);
  if (n[1] > 0) out.fake = static_cast<double>(correct[1]) / static_cast<double>(n[1]);
  return out;
}

MetricsReport evaluate(std::span<const EvalRecord> records, double threshold) {
  MetricsReport report;
  report.n = records.size();
  report.accuracy = accuracy(records, threshold);
  for (const auto& r : records) {
    (r.label == Label::kFake ? report.n_fake : report.n_real)++;
  }
  const ClassAccuracy per_class = per_class_accuracy(records, threshold);
  report.real_accuracy = per_class.real;
  report.fake_accuracy = per_class.fake;
  if (report.n_real > 0 && report.n_fake > 0) {
    report.average_precision = average_precision(records);
  }
  return report;
}

double mean(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::kEmptyInput, "mean of no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<double> sample_std(std::span<const double> values) {
  if (values.size() < 2) return std::nullopt;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::vector<std::string> AggregateReport::rows_by_ascending_mean() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : groups) ids.push_back(id);
  std::stable_sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
    const auto& ra = groups.at(a);
    const auto& rb = groups.at(b);
    return std::make_tuple(ra.accuracy, ra.average_precision.value_or(-1.0), a) <
           std::make_tuple(rb.accuracy, rb.average_precision.value_or(-1.0), b);
  });
  return ids;
}

AggregateReport aggregate(const std::map<std::string, MetricsReport>& groups) {
  if (groups.empty()) fail(ErrorCode::kEmptyInput, "aggregate: no groups");
  AggregateReport out;
  out.groups = groups;
  std::vector<double> accs, aps;
  for (const auto& [_, report] : groups) {
    accs.push_back(report.accuracy);
    if (report.average_precision) aps.push_back(*report.average_precision);
  }
  out.mean_accuracy = mean(accs);
  out.std_accuracy = sample_std(accs);
  if (!aps.empty()) {
    out.mean_ap = mean(aps);
    out.std_ap = sample_std(aps);
  }
  return out;
}

std::string group_by_name(GroupBy group_by) {
  return group_by == GroupBy::kDataset ? "dataset" : "generator";
}

GroupBy parse_group_by(const std::string& name) {
  if (name == "dataset") return GroupBy::kDataset;
  if (name == "generator") return GroupBy::kGenerator;
  fail(ErrorCode::kInvalidArgument, "group-by must be 'dataset' or 'generator'");
}

std::string pool_mode_name(PoolMode mode) {
  return mode == PoolMode::kPooled ? "pooled" : "generator-mean";
}

PoolMode parse_pool_mode(const std::string& name) {
  if (name == "pooled") return PoolMode::kPooled;
  if (name == "generator-mean") return PoolMode::kGeneratorMean;
  fail(ErrorCode::kInvalidArgument, "pool mode must be 'pooled' or 'generator-mean'");
}

std::map<std::string, MetricsReport> group_metrics(std::span<const EvalRecord> records,
                                                   GroupBy group_by, PoolMode pool_mode,
                                                   double threshold) {
  if (records.empty()) fail(ErrorCode::kEmptyInput, "group_metrics: no records");

  // Generator groups: fakes of the generator plus reals of its datasets.
  auto generator_groups = [&](std::span<const EvalRecord> subset) {
    std::map<std::string, std::set<std::string>> datasets_of;
    for (const auto& r : subset) {
      if (r.label == Label::kFake) datasets_of[r.generator_id].insert(r.dataset_id);
    }
    std::map<std::string, MetricsReport> out;
    for (const auto& [generator, datasets] : datasets_of) {
      std::vector<EvalRecord> group;
      for (const auto& r : subset) {
        if ((r.label == Label::kFake && r.generator_id == generator) ||
            (r.label == Label::kReal && datasets.count(r.dataset_id) > 0)) {
          group.push_back(r);
        }
      }
      out[generator] = evaluate(group, threshold);
    }
    return out;
  };

  if (group_by == GroupBy::kGenerator) return generator_groups(records);

  std::map<std::string, std::vector<EvalRecord>> by_dataset;
  for (const auto& r : records) by_dataset[r.dataset_id].push_back(r);
  std::map<std::string, MetricsReport> out;
  for (const auto& [dataset, subset] : by_dataset) {
    MetricsReport pooled = evaluate(subset, threshold);
    if (pool_mode == PoolMode::kGeneratorMean) {
      const auto per_generator = generator_groups(subset);
      if (!per_generator.empty()) {
        const AggregateReport agg = aggregate(per_generator);
        pooled.accuracy = agg.mean_accuracy;
        pooled.average_precision = agg.mean_ap;
      }
    }
    out[dataset] = pooled;
  }
  return out;
}

std::string SplitReport::describe() const {
  if (disjoint()) return "generator and dataset sets are disjoint";
  std::string out;
  if (!shared_generators.empty()) {
    out += "shared generators:";
    for (const auto& g : shared_generators) out += " " + g;
  }
  if (!shared_datasets.empty()) {
    if (!out.empty()) out += "; ";
    out += "shared datasets:";
    for (const auto& d : shared_datasets) out += " " + d;
  }
  return out;
}

SplitReport assert_two_axis_split(std::span<const datasets::ManifestEntry> train,
                                  std::span<const datasets::ManifestEntry> test,
                                  SplitMode mode) {
  auto collect = [](std::span<const datasets::ManifestEntry> entries) {
    std::pair<std::set<std::string>, std::set<std::string>> sets;
    for (const auto& e : entries) {
      if (e.label != Label::kFake) continue;
      sets.first.insert(e.generator_id);
      sets.second.insert(e.dataset_id);
    }
    return sets;
  };
  const auto [train_gen, train_ds] = collect(train);
  const auto [test_gen, test_ds] = collect(test);
  SplitReport report;
  std::set_intersection(train_gen.begin(), train_gen.end(), test_gen.begin(), test_gen.end(),
                        std::back_inserter(report.shared_generators));
  std::set_intersection(train_ds.begin(), train_ds.end(), test_ds.begin(), test_ds.end(),
                        std::back_inserter(report.shared_datasets));
  if (mode == SplitMode::kStrict && !report.disjoint()) {
    fail(ErrorCode::kSplitViolation, report.describe());
  }
  return report;
}

}  // namespace fusiondetect::metrics
