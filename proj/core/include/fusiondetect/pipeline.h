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

#ifndef FUSIONDETECT_PIPELINE_H_
#define FUSIONDETECT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fusiondetect/feature_cache.h"
#include "fusiondetect/feature_pipeline.h"
#include "fusiondetect/imaging.h"
#include "fusiondetect/manifest.h"
#include "fusiondetect/metrics.h"
#include "fusiondetect/promptgen.h"
#include "fusiondetect/report.h"
#include "fusiondetect/trainer.h"
#include "fusiondetect/tsne.h"

namespace fusiondetect::pipeline {

enum class SplitCheck { kStrict, kAudit, kOff };

std::string split_check_name(SplitCheck mode);
SplitCheck parse_split_check(const std::string& name);

// Every setting a command can consume. Keys accepted by set() are listed by
// config_keys(); flags, config files and defaults all go through set().
struct RunConfig {
  std::filesystem::path run_dir;

  // Backbone locators: "toy:<dim>:<seed>" or a descriptor file.
  std::string semantic;
  std::string structural;
  head::BackboneMask backbones = head::BackboneMask::kBoth;
  bool l2_normalize = false;

  // Classifier depths to train; more than one runs a sweep.
  std::vector<int> depths = {4};
  std::vector<int> hidden_widths;
  head::TrainConfig train;

  datasets::SamplingSpec sampling;
  // Balanced sampling before extraction.
  bool sample = false;

  std::filesystem::path manifest;
  std::filesystem::path test_manifest;
  std::vector<std::filesystem::path> caches;
  std::filesystem::path checkpoint;

  std::vector<imaging::PerturbSpec> perturbations;
  metrics::GroupBy group_by = metrics::GroupBy::kDataset;
  metrics::PoolMode pool_mode = metrics::PoolMode::kPooled;
  double threshold = metrics::kDefaultThreshold;
  SplitCheck split_check = SplitCheck::kStrict;

  tsne::TsneConfig tsne;
  // Points drawn per dataset for t-SNE; 0 keeps every row.
  int tsne_per_dataset = 0;

  std::filesystem::path pools;
  int64_t prompt_count = 1000;
  uint64_t prompt_seed = 0;
  std::vector<std::string> generators;
  std::string prompt_dataset = "omnigen";

  std::vector<std::string> report_inputs;
  std::filesystem::path values;
  std::string title = "FusionDetect";

  RunConfig();

  // Throws kInvalidArgument for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  // Ordered key/value dump; set(k, v) for every pair reproduces the config.
  metrics::ConfigEntries resolved() const;
};

std::vector<std::string> config_keys();

// Flat "key = value" lines; '#' starts a comment line. Applied on top of
// `config` in file order.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

using Logger = std::function<void(const std::string&)>;

// Sibling of a cache holding the manifest its indices refer to.
std::filesystem::path cache_manifest_path(const std::filesystem::path& cache);

// Tracks files written into a run directory and finishes with
// files.txt (path, bytes, sha256) and config.txt.
class RunDirectory {
 public:
  RunDirectory(std::filesystem::path dir, const RunConfig& config);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  void write_text(const std::string& name, const std::string& text);
  // Registers a file written by other means.
  void record(const std::filesystem::path& file);
  void finish();

 private:
  std::filesystem::path dir_;
  metrics::ConfigEntries config_;
  std::vector<std::filesystem::path> files_;
};

struct ExtractSummary {
  std::filesystem::path cache;
  size_t rows = 0;
  std::vector<datasets::SkippedImage> skipped;
};
ExtractSummary cmd_extract(const RunConfig& config, const Logger& log = {});

struct TrainedHead {
  int depth = 0;
  std::filesystem::path checkpoint;
  std::filesystem::path history;
  head::TrainResult result;
};
struct TrainSummary {
  std::vector<TrainedHead> heads;
  std::optional<metrics::SplitReport> split;
};
TrainSummary cmd_train(const RunConfig& config, const Logger& log = {});

struct EvalSummary {
  metrics::AggregateReport report;
  std::vector<metrics::EvalRecord> records;
};
EvalSummary cmd_eval(const RunConfig& config, const Logger& log = {});

struct RobustnessSummary {
  std::vector<metrics::RobustnessColumn> columns;
  metrics::ReportTable table;
};
RobustnessSummary cmd_robustness(const RunConfig& config, const Logger& log = {});

struct TsneSummary {
  tsne::TsneResult result;
  std::vector<datasets::ManifestEntry> entries;
};
TsneSummary cmd_tsne(const RunConfig& config, const Logger& log = {});

struct PromptsSummary {
  std::vector<promptgen::PromptBatch> batches;
  size_t subject_pool_size = 0;
};
PromptsSummary cmd_prompts(const RunConfig& config, const Logger& log = {});

struct ReportSummary {
  metrics::ReportTable table;
};
// Renders stored eval results (report_inputs, "label=path" or path) as a
// comparison, or a values CSV (group,acc,ap in percent) as an aggregate
// table.
ReportSummary cmd_report(const RunConfig& config, const Logger& log = {});

// Scatter plot of a 2-D embedding, one color per class id.
imaging::RawImage render_scatter(std::span<const double> xy, std::span<const int> classes,
                                 int size = 800);

}  // namespace fusiondetect::pipeline

#endif  // FUSIONDETECT_PIPELINE_H_
