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

#include "fusiondetect/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "file_util.h"
#include "fusiondetect/backbone.h"
#include "fusiondetect/checkpoint.h"
#include "fusiondetect/error.h"
#include "fusiondetect/parallel.h"
#include "fusiondetect/rng.h"

namespace fusiondetect::pipeline {
namespace {

namespace fs = std::filesystem;
using datasets::Manifest;
using datasets::ManifestEntry;
using datasets::Split;

void note(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kInvalidArgument, what + " is required");
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string group_header(metrics::GroupBy g) {
  return g == metrics::GroupBy::kDataset ? "Dataset" : "Generator";
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

head::FeaturePipeline build_pipeline(const RunConfig& config) {
  const bool want_semantic = config.backbones != head::BackboneMask::kStructural;
  const bool want_structural = config.backbones != head::BackboneMask::kSemantic;
  require(!want_semantic || !config.semantic.empty(), "semantic backbone (semantic=...)");
  require(!want_structural || !config.structural.empty(), "structural backbone (structural=...)");
  std::shared_ptr<const backbone::BackboneRunner> semantic;
  std::shared_ptr<const backbone::BackboneRunner> structural;
  if (want_semantic) semantic = backbone::open_backbone(config.semantic);
  if (want_structural) structural = backbone::open_backbone(config.structural);
  return head::FeaturePipeline(std::move(semantic), std::move(structural),
                               {config.backbones, config.l2_normalize});
}

bool has_backbones(const RunConfig& config) {
  return !config.semantic.empty() || !config.structural.empty();
}

Manifest with_absolute_paths(const Manifest& manifest) {
  Manifest out;
  out.base_dir = fs::absolute(manifest.base_dir);
  for (const auto& e : manifest.entries) {
    ManifestEntry copy = e;
    copy.path = fs::absolute(manifest.resolve(e)).lexically_normal().string();
    out.entries.push_back(std::move(copy));
  }
  return out;
}

Manifest subset(const Manifest& manifest, Split split) {
  Manifest out;
  out.base_dir = manifest.base_dir;
  out.entries = datasets::filter_split(manifest.entries, split);
  return out;
}

// A cache plus the manifest rows its indices refer to.
struct CachedFeatures {
  datasets::FeatureCache cache;
  std::optional<Manifest> manifest;

  const ManifestEntry& entry(size_t row) const {
    return manifest->entries.at(static_cast<size_t>(cache.indices[row]));
  }
};

CachedFeatures load_cached(const fs::path& path, std::optional<uint64_t> expected_hash,
                           bool need_manifest) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) fail(ErrorCode::kFileNotFound, "feature cache " + path.string());
  CachedFeatures out;
  out.cache = datasets::read_feature_cache(path, expected_hash);
  const fs::path sidecar = cache_manifest_path(path);
  if (fs::is_regular_file(sidecar, ec)) {
    out.manifest = datasets::load_manifest(sidecar);
    for (uint64_t index : out.cache.indices) {
      if (index >= out.manifest->entries.size()) {
        fail(ErrorCode::kInvariantViolation,
             path.string() + ": row index " + std::to_string(index) + " outside " +
                 sidecar.string());
      }
    }
  } else if (need_manifest) {
    fail(ErrorCode::kFileNotFound, "cache manifest " + sidecar.string());
  }
  return out;
}

std::optional<uint64_t> expected_hash(const RunConfig& config) {
  if (!has_backbones(config)) return std::nullopt;
  return build_pipeline(config).hash();
}

std::vector<double> score_rows(const head::MlpParams& params, const head::FeatureMatrix& features,
                               std::span<const size_t> rows) {
  std::vector<double> scores(rows.size());
  parallel_for(rows.size(), [&](size_t i) {
    scores[i] = head::predict_proba(params, features.row(rows[i]));
  });
  return scores;
}

std::vector<metrics::EvalRecord> records_from(const datasets::ExtractResult& extracted,
                                              const Manifest& manifest,
                                              const head::MlpParams& params) {
  std::vector<size_t> rows(extracted.cache.size());
  for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  const auto scores = score_rows(params, extracted.cache.features, rows);
  std::vector<metrics::EvalRecord> records;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& e = manifest.entries[extracted.cache.indices[i]];
    records.push_back({scores[i], e.label, e.generator_id, e.dataset_id});
  }
  return records;
}

head::MlpParams load_head(const RunConfig& config, size_t input_dim) {
  require(!config.checkpoint.empty(), "checkpoint");
  return head::load_checkpoint(config.checkpoint, static_cast<int>(input_dim));
}

Manifest evaluation_manifest(const RunConfig& config) {
  const fs::path path = config.test_manifest.empty() ? config.manifest : config.test_manifest;
  require(!path.empty(), "manifest (manifest=... or test_manifest=...)");
  Manifest test = subset(datasets::load_manifest(path), Split::kTest);
  if (test.entries.empty()) fail(ErrorCode::kEmptyInput, path.string() + ": no test-split rows");
  return test;
}

std::string skip_report(const std::vector<datasets::SkippedImage>& skipped) {
  std::string out = "index\tpath\treason\n";
  for (const auto& s : skipped) {
    out += std::to_string(s.index) + "\t" + s.path + "\t" + s.reason + "\n";
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

void write_png(RunDirectory& run, const std::string& name, const imaging::RawImage& img) {
  imaging::save_png(img, run.path(name));
  run.record(run.path(name));
}

metrics::AggregateReport aggregate_records(const RunConfig& config,
                                           std::span<const metrics::EvalRecord> records) {
  return metrics::aggregate(
      metrics::group_metrics(records, config.group_by, config.pool_mode, config.threshold));
}

}  // namespace

fs::path cache_manifest_path(const fs::path& cache) {
  return fs::path(cache.string() + ".manifest.jsonl");
}

RunDirectory::RunDirectory(fs::path dir, const RunConfig& config)
    : dir_(std::move(dir)), config_(config.resolved()) {
  require(!dir_.empty(), "run directory (run_dir=...)");
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create run directory " + dir_.string() + ": " + ec.message());
}

void RunDirectory::write_text(const std::string& name, const std::string& text) {
  internal::write_text_file(path(name), text);
  record(path(name));
}

void RunDirectory::record(const fs::path& file) {
  if (std::find(files_.begin(), files_.end(), file) == files_.end()) files_.push_back(file);
}

void RunDirectory::finish() {
  std::string cfg;
  for (const auto& [key, value] : config_) cfg += key + " = " + value + "\n";
  write_text("config.txt", cfg);
  std::vector<std::string> lines;
  for (const auto& file : files_) {
    std::error_code ec;
    const auto size = fs::file_size(file, ec);
    lines.push_back(file.lexically_relative(dir_).string() + "\t" +
                    std::to_string(ec ? 0 : size) + "\t" + backbone::sha256_file(file));
  }
  std::sort(lines.begin(), lines.end());
  std::string listing = "path\tbytes\tdigest\n";
  for (const auto& l : lines) listing += l + "\n";
  internal::write_text_file(path("files.txt"), listing);
}

ExtractSummary cmd_extract(const RunConfig& config, const Logger& log) {
  require(!config.manifest.empty(), "manifest");
  RunDirectory run(config.run_dir, config);
  Manifest manifest = with_absolute_paths(datasets::load_manifest(config.manifest));
  if (config.sample) {
    manifest.entries = datasets::balanced_sample(manifest.entries, config.sampling);
    note(log, "sampled " + std::to_string(manifest.entries.size()) + " rows");
  }
  const head::FeaturePipeline pipeline = build_pipeline(config);
  note(log, "feature pipeline: " + pipeline.description() + " (dim " +
                std::to_string(pipeline.dim()) + ")");

  datasets::ExtractOptions options;
  options.augment.probability = config.train.augment_probability;
  options.seed = config.train.seed;
  const size_t total = manifest.entries.size();
  const size_t step = std::max<size_t>(1, total / 10);
  Stopwatch clock;
  auto extracted = datasets::extract_features(manifest, pipeline, options,
                                              [&](size_t done, size_t n) {
                                                if (done % step == 0 || done == n) {
                                                  note(log, "extract " + std::to_string(done) +
                                                                "/" + std::to_string(n));
                                                }
                                              });
  const double secs = clock.seconds();
  note(log, "extracted " + std::to_string(extracted.cache.size()) + " rows, skipped " +
                std::to_string(extracted.skipped.size()) + " in " + fixed(secs, 2) + " s (" +
                fixed(secs > 0 ? static_cast<double>(total) / secs : 0.0, 1) + " img/s)");
  for (const auto& s : extracted.skipped) note(log, "skipped " + s.path + ": " + s.reason);

  ExtractSummary summary;
  summary.cache = run.path("features.fdc");
  datasets::write_feature_cache(summary.cache, extracted.cache);
  run.record(summary.cache);
  datasets::write_manifest(cache_manifest_path(summary.cache), manifest.entries);
  run.record(cache_manifest_path(summary.cache));
  run.write_text("skipped.tsv", skip_report(extracted.skipped));
  run.finish();
  summary.rows = extracted.cache.size();
  summary.skipped = std::move(extracted.skipped);
  return summary;
}

TrainSummary cmd_train(const RunConfig& config, const Logger& log) {
  require(!config.caches.empty(), "feature cache (cache=...)");
  RunDirectory run(config.run_dir, config);
  const CachedFeatures data = load_cached(config.caches.front(), expected_hash(config), false);

  std::vector<size_t> rows;
  TrainSummary summary;
  if (data.manifest) {
    for (size_t i = 0; i < data.cache.size(); ++i) {
      if (data.entry(i).split == Split::kTrain) rows.push_back(i);
    }
    if (rows.empty()) fail(ErrorCode::kEmptyInput, "cache holds no train-split rows");
    if (config.split_check != SplitCheck::kOff) {
      std::vector<ManifestEntry> train_entries = datasets::filter_split(data.manifest->entries, Split::kTrain);
      std::vector<ManifestEntry> test_entries = datasets::filter_split(data.manifest->entries, Split::kTest);
      if (!config.test_manifest.empty()) {
        const auto extra = datasets::load_manifest(config.test_manifest);
        const auto extra_test = datasets::filter_split(extra.entries, Split::kTest);
        test_entries.insert(test_entries.end(), extra_test.begin(), extra_test.end());
      }
      const auto mode = config.split_check == SplitCheck::kStrict ? metrics::SplitMode::kStrict
                                                                   : metrics::SplitMode::kAudit;
      summary.split = metrics::assert_two_axis_split(train_entries, test_entries, mode);
      note(log, "split check: " + summary.split->describe());
      run.write_text("split_check.txt", summary.split->describe() + "\n");
    }
  } else {
    for (size_t i = 0; i < data.cache.size(); ++i) rows.push_back(i);
    note(log, "no cache manifest; training on every row without a split check");
  }

  head::FeatureMatrix features(data.cache.features.dim);
  std::vector<Label> labels;
  for (size_t r : rows) {
    features.append(data.cache.features.row(r));
    labels.push_back(data.cache.labels[r]);
  }
  const int input_dim = static_cast<int>(features.dim);
  const bool sweep = config.depths.size() > 1;
  if (sweep && !config.hidden_widths.empty()) {
    fail(ErrorCode::kInvalidArgument, "hidden_widths cannot be combined with a depth sweep");
  }
  for (int depth : config.depths) {
    head::MlpConfig mlp = head::MlpConfig::with_depth(input_dim, depth);
    if (!config.hidden_widths.empty()) {
      mlp.hidden_widths = config.hidden_widths;
      mlp.validate();
    }
    note(log, "training " + mlp.describe() + " on " + std::to_string(rows.size()) + " rows");
    TrainedHead trained;
    trained.depth = mlp.depth();
    trained.result = head::train(features, labels, mlp, config.train, [&](const head::EpochStats& s) {
      note(log, "depth " + std::to_string(mlp.depth()) + " epoch " + std::to_string(s.epoch) +
                    " loss " + fixed(s.mean_loss, 6) + " acc " + fixed(s.accuracy, 4));
    });
    const std::string suffix = sweep ? "_d" + std::to_string(depth) : "";
    trained.checkpoint = run.path("head" + suffix + ".fdh");
    head::save_checkpoint(trained.checkpoint, trained.result.params);
    run.record(trained.checkpoint);
    std::string history = "epoch,mean_loss,accuracy\n";
    for (const auto& s : trained.result.history) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g\n", s.epoch, s.mean_loss, s.accuracy);
      history += buf;
    }
    trained.history = run.path("history" + suffix + ".csv");
    run.write_text(trained.history.filename().string(), history);
    summary.heads.push_back(std::move(trained));
  }
  run.finish();
  return summary;
}

namespace {

void write_eval_outputs(RunDirectory& run, const RunConfig& config,
                        const std::vector<metrics::EvalRecord>& records,
                        const std::vector<std::string>& paths,
                        const metrics::AggregateReport& report) {
  std::string predictions = "path,label,generator_id,dataset_id,score\n";
  for (size_t i = 0; i < records.size(); ++i) {
    char score[32];
    std::snprintf(score, sizeof(score), "%.9g", records[i].score);
    predictions += csv_field(paths[i]) + "," + std::string(label_name(records[i].label)) + "," +
                   csv_field(records[i].generator_id) + "," + csv_field(records[i].dataset_id) +
                   "," + score + "\n";
  }
  run.write_text("predictions.csv", predictions);
  const std::string header = group_header(config.group_by);
  run.write_text("metrics.json",
                 metrics::aggregate_to_json(report, metrics::group_by_name(config.group_by),
                                            config.resolved()));
  run.write_text("table.csv", metrics::aggregate_raw_table(report, header).to_csv());
  run.write_text("report.md",
                 metrics::markdown_document(
                     config.title,
                     {{"Acc / AP", metrics::aggregate_table(report, header)},
                      {"Per-class accuracy",
                       metrics::aggregate_table(report, header, metrics::CellKind::kClassAcc)}},
                     config.resolved()));
}

}  // namespace

EvalSummary cmd_eval(const RunConfig& config, const Logger& log) {
  RunDirectory run(config.run_dir, config);
  EvalSummary summary;
  std::vector<std::string> paths;
  if (!config.caches.empty()) {
    for (const auto& cache_path : config.caches) {
      const CachedFeatures data = load_cached(cache_path, expected_hash(config), true);
      std::vector<size_t> rows;
      for (size_t i = 0; i < data.cache.size(); ++i) {
        if (data.entry(i).split == Split::kTest) rows.push_back(i);
      }
      if (rows.empty()) fail(ErrorCode::kEmptyInput, cache_path.string() + ": no test-split rows");
      const head::MlpParams params = load_head(config, data.cache.features.dim);
      const auto scores = score_rows(params, data.cache.features, rows);
      for (size_t k = 0; k < rows.size(); ++k) {
        const auto& e = data.entry(rows[k]);
        summary.records.push_back({scores[k], e.label, e.generator_id, e.dataset_id});
        paths.push_back(e.path);
      }
    }
  } else {
    const Manifest test = evaluation_manifest(config);
    const head::FeaturePipeline pipeline = build_pipeline(config);
    const head::MlpParams params = load_head(config, pipeline.dim());
    const auto extracted = datasets::extract_features(test, pipeline);
    for (const auto& s : extracted.skipped) note(log, "skipped " + s.path + ": " + s.reason);
    summary.records = records_from(extracted, test, params);
    for (uint64_t index : extracted.cache.indices) paths.push_back(test.entries[index].path);
    run.write_text("skipped.tsv", skip_report(extracted.skipped));
  }
  summary.report = aggregate_records(config, summary.records);
  note(log, "mean Acc / AP: " +
                metrics::format_cell(summary.report.mean_accuracy, summary.report.mean_ap));
  write_eval_outputs(run, config, summary.records, paths, summary.report);
  run.finish();
  return summary;
}

RobustnessSummary cmd_robustness(const RunConfig& config, const Logger& log) {
  RunDirectory run(config.run_dir, config);
  const Manifest test = evaluation_manifest(config);
  const head::FeaturePipeline pipeline = build_pipeline(config);
  const head::MlpParams params = load_head(config, pipeline.dim());
  RobustnessSummary summary;
  std::string raw = "perturbation,group,n,accuracy,average_precision\n";
  for (const auto& perturbation : config.perturbations) {
    datasets::ExtractOptions options;
    options.perturbation = perturbation;
    Stopwatch clock;
    const auto extracted = datasets::extract_features(test, pipeline, options);
    const auto records = records_from(extracted, test, params);
    metrics::RobustnessColumn column{perturbation, aggregate_records(config, records)};
    note(log, perturbation.label() + ": " +
                  metrics::format_cell(column.report.mean_accuracy, column.report.mean_ap) +
                  " (" + fixed(clock.seconds(), 2) + " s)");
    for (const auto& [id, r] : column.report.groups) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), ",%zu,%.10g,", r.n, r.accuracy);
      raw += perturbation.token() + "," + id + buf +
             (r.average_precision ? fixed(*r.average_precision, 10) : "") + "\n";
    }
    summary.columns.push_back(std::move(column));
  }
  summary.table = metrics::robustness_table(summary.columns, group_header(config.group_by));
  run.write_text("robustness.csv", summary.table.to_csv());
  run.write_text("robustness_raw.csv", raw);
  run.write_text("robustness.md",
                 metrics::markdown_document(config.title + " robustness",
                                            {{"Acc / AP under perturbation", summary.table}},
                                            config.resolved()));
  run.finish();
  return summary;
}

TsneSummary cmd_tsne(const RunConfig& config, const Logger& log) {
  require(!config.caches.empty(), "feature cache (cache=...)");
  RunDirectory run(config.run_dir, config);
  head::FeatureMatrix points;
  TsneSummary summary;
  for (const auto& cache_path : config.caches) {
    const CachedFeatures data = load_cached(cache_path, std::nullopt, true);
    if (points.dim == 0) points = head::FeatureMatrix(data.cache.features.dim);
    if (data.cache.features.dim != points.dim) {
      fail(ErrorCode::kShapeMismatch, cache_path.string() + ": feature dim " +
                                          std::to_string(data.cache.features.dim) +
                                          " differs from " + std::to_string(points.dim));
    }
    std::map<std::string, std::vector<size_t>> by_dataset;
    for (size_t i = 0; i < data.cache.size(); ++i) by_dataset[data.entry(i).dataset_id].push_back(i);
    std::vector<size_t> chosen;
    for (auto& [dataset, rows] : by_dataset) {
      const size_t keep = config.tsne_per_dataset > 0
                              ? std::min(rows.size(), static_cast<size_t>(config.tsne_per_dataset))
                              : rows.size();
      Rng rng(derive_seed(config.tsne.seed, fnv1a64(dataset)));
      for (size_t i = 0; i < keep; ++i) std::swap(rows[i], rows[i + rng.below(rows.size() - i)]);
      chosen.insert(chosen.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(chosen.begin(), chosen.end());
    for (size_t r : chosen) {
      points.append(data.cache.features.row(r));
      summary.entries.push_back(data.entry(r));
    }
  }
  note(log, "t-SNE on " + std::to_string(points.rows()) + " points of dim " +
                std::to_string(points.dim));
  Stopwatch clock;
  summary.result = tsne::run_tsne(points, config.tsne);
  note(log, "t-SNE done in " + fixed(clock.seconds(), 2) + " s, final KL " +
                fixed(summary.result.kl_history.back(), 6));
  if (summary.result.jittered_points > 0) {
    note(log, "jittered " + std::to_string(summary.result.jittered_points) + " duplicate points");
  }
  if (summary.result.unconverged_rows > 0) {
    note(log, std::to_string(summary.result.unconverged_rows) +
                  " rows missed the perplexity target");
  }

  std::map<std::string, int> class_ids;
  for (const auto& e : summary.entries) {
    class_ids.emplace(e.dataset_id + "/" + std::string(label_name(e.label)), 0);
  }
  int next = 0;
  for (auto& [_, id] : class_ids) id = next++;
  std::vector<int> classes;
  metrics::ReportTable csv{{"x", "y", "label", "generator_id", "dataset_id"}, {}};
  for (size_t i = 0; i < summary.entries.size(); ++i) {
    const auto& e = summary.entries[i];
    classes.push_back(class_ids.at(e.dataset_id + "/" + std::string(label_name(e.label))));
    char x[32], y[32];
    std::snprintf(x, sizeof(x), "%.9g", summary.result.embedding[2 * i]);
    std::snprintf(y, sizeof(y), "%.9g", summary.result.embedding[2 * i + 1]);
    csv.rows.push_back({x, y, std::string(label_name(e.label)), e.generator_id, e.dataset_id});
  }
  run.write_text("tsne.csv", csv.to_csv());
  std::string kl = "iteration,kl\n";
  for (size_t i = 0; i < summary.result.kl_history.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i, summary.result.kl_history[i]);
    kl += buf;
  }
  run.write_text("tsne_kl.csv", kl);
  std::string legend = "class\tname\n";
  for (const auto& [name, id] : class_ids) legend += std::to_string(id) + "\t" + name + "\n";
  run.write_text("tsne_classes.tsv", legend);
  write_png(run, "tsne.png", render_scatter(summary.result.embedding, classes));
  run.write_text("tsne_meta.txt",
                 "points = " + std::to_string(points.rows()) +
                     "\njittered_points = " + std::to_string(summary.result.jittered_points) +
                     "\nunconverged_rows = " + std::to_string(summary.result.unconverged_rows) +
                     "\n");
  run.finish();
  return summary;
}

PromptsSummary cmd_prompts(const RunConfig& config, const Logger& log) {
  require(!config.pools.empty(), "prompt pool directory (pools=...)");
  require(!config.generators.empty(), "target generator list (generators=...)");
  RunDirectory run(config.run_dir, config);
  const promptgen::PromptPools pools = promptgen::load_pools(config.pools);
  PromptsSummary summary;
  summary.subject_pool_size = pools.slot("subject").size();
  std::string report;
  for (size_t k = 0; k < promptgen::kSlotCount; ++k) {
    report += std::string(promptgen::kSlotNames[k]) + "_pool = " +
              std::to_string(pools.slots[k].size()) + "\n";
  }
  report += "combinations = " + std::to_string(pools.combination_count()) + "\n";
  std::string stub;
  for (const auto& generator : config.generators) {
    auto batch = promptgen::generate_batch(pools, config.prompt_count,
                                           derive_seed(config.prompt_seed, fnv1a64(generator)),
                                           generator);
    std::string lines;
    for (const auto& r : batch.records) lines += promptgen::to_json_line(r) + "\n";
    run.write_text("prompts_" + safe_name(generator) + ".jsonl", lines);
    stub += promptgen::manifest_stub(batch, config.prompt_dataset);
    report += generator + ": records = " + std::to_string(batch.records.size()) +
              ", duplicates = " + std::to_string(batch.duplicate_ids.size()) +
              ", redraws = " + std::to_string(batch.redraws) + "\n";
    note(log, generator + ": " + std::to_string(batch.records.size()) + " prompts, " +
                  std::to_string(batch.duplicate_ids.size()) + " duplicates");
    summary.batches.push_back(std::move(batch));
  }
  run.write_text("manifest_stub.jsonl", stub);
  run.write_text("prompts_summary.txt", report);
  note(log, "subject pool size " + std::to_string(summary.subject_pool_size));
  run.finish();
  return summary;
}

ReportSummary cmd_report(const RunConfig& config, const Logger& log) {
  const bool has_values = !config.values.empty();
  if (!has_values && config.report_inputs.empty()) {
    fail(ErrorCode::kInvalidArgument, "report needs values=<csv> or report_inputs=<metrics.json,...>");
  }
  RunDirectory run(config.run_dir, config);
  ReportSummary summary;
  std::vector<std::pair<std::string, metrics::ReportTable>> sections;
  if (has_values) {
    std::istringstream in(internal::read_text_file(config.values));
    std::map<std::string, metrics::MetricsReport> groups;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = internal::trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto cells = internal::split(t, ',');
      const std::string where = config.values.string() + ":" + std::to_string(line_no);
      if (cells.size() < 2 || cells.size() > 3) fail(ErrorCode::kParseError, where + ": expected group,acc[,ap]");
      char* end = nullptr;
      const std::string acc_text = internal::trim(cells[1]);
      const double acc = std::strtod(acc_text.c_str(), &end);
      if (end != acc_text.c_str() + acc_text.size() || acc_text.empty()) {
        if (line_no == 1) continue;  // header row
        fail(ErrorCode::kParseError, where + ": accuracy is not a number");
      }
      metrics::MetricsReport r;
      r.accuracy = acc / 100.0;
      if (cells.size() == 3) {
        const std::string ap_text = internal::trim(cells[2]);
        const double ap = std::strtod(ap_text.c_str(), &end);
        if (end != ap_text.c_str() + ap_text.size() || ap_text.empty()) {
          fail(ErrorCode::kParseError, where + ": AP is not a number");
        }
        r.average_precision = ap / 100.0;
      }
      groups[internal::trim(cells[0])] = r;
    }
    const auto report = metrics::aggregate(groups);
    summary.table = metrics::aggregate_table(report, "Group");
    sections.emplace_back("Acc / AP", summary.table);
  } else {
    std::vector<std::pair<std::string, metrics::AggregateReport>> runs;
    for (const auto& input : config.report_inputs) {
      const size_t eq = input.find('=');
      const fs::path path = eq == std::string::npos ? fs::path(input) : fs::path(input.substr(eq + 1));
      const std::string label = eq == std::string::npos
                                    ? path.parent_path().filename().string()
                                    : input.substr(0, eq);
      const auto stored = metrics::aggregate_from_json(internal::read_text_file(path));
      runs.emplace_back(label, stored.report);
      const std::string header = stored.group_by == "generator" ? "Generator" : "Dataset";
      sections.emplace_back(label, metrics::aggregate_table(stored.report, header));
    }
    summary.table = metrics::comparison_table(runs, "Variant");
    sections.insert(sections.begin(), {"Comparison", summary.table});
  }
  run.write_text("report.csv", summary.table.to_csv());
  run.write_text("report.md", metrics::markdown_document(config.title, sections, config.resolved()));
  note(log, "\n" + summary.table.to_markdown());
  run.finish();
  return summary;
}

}  // namespace fusiondetect::pipeline
