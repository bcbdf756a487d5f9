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

// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// the number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fusiondetect/composition.h"
#include "fusiondetect/error.h"
#include "fusiondetect/feature_cache.h"
#include "fusiondetect/imaging.h"
#include "fusiondetect/metrics.h"
#include "fusiondetect/mlp.h"
#include "fusiondetect/pipeline.h"
#include "fusiondetect/promptgen.h"
#include "fusiondetect/report.h"
#include "fusiondetect/rng.h"
#include "fusiondetect/tsne.h"
#include "support/oracles.h"
#include "support/test_support.h"

namespace fd = fusiondetect;
namespace ds = fusiondetect::datasets;
namespace hd = fusiondetect::head;
namespace im = fusiondetect::imaging;
namespace mt = fusiondetect::metrics;
namespace pg = fusiondetect::promptgen;
namespace pl = fusiondetect::pipeline;
namespace ts = fusiondetect::tsne;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates failed checks; the first few are kept for the report line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (failures_.size() < 3) failures_.push_back(what);
  }
  Outcome outcome(const std::string& summary) const {
    std::string detail = summary;
    for (const auto& f : failures_) detail += "; " + f;
    return {pass_, detail};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> failures_;
};

std::string fmt(const char* pattern, double v) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome gradient_correctness() {
  const auto start = std::chrono::steady_clock::now();
  Checks c;
  double worst = 0.0;
  size_t checked = 0;
  size_t skipped = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const auto cfg = fdtest::random_mlp_config(seed);
    const auto r = fdtest::mlp_gradient_check(cfg, seed, 4, 1e-5);
    worst = std::max(worst, r.max_rel_error);
    checked += r.checked;
    skipped += r.kink_skipped;
    c.expect(r.max_rel_error < 1e-4, "config " + std::to_string(seed) + " " + cfg.describe() +
                                          fmt(" rel err %.3g", r.max_rel_error));
  }
  const double secs = seconds_since(start);
  c.expect(secs < 30.0, fmt("took %.1f s", secs));
  c.expect(skipped * 100 <= checked, std::to_string(skipped) + " parameters straddle a ReLU kink");
  return c.outcome("100 configs, " + std::to_string(checked) + " parameters (" + std::to_string(skipped) +
                   " straddling a ReLU kink excluded), max rel err " + fmt("%.2e", worst) +
                   fmt(", %.2f s", secs));
}

Outcome ap_oracle() {
  Checks c;
  fd::Rng rng(2024);
  double worst = 0.0;
  int sets = 0;
  while (sets < 1000) {
    const size_t n = 2 + rng.below(11);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (size_t i = 0; i < n; ++i) {
      // Coarse scores so ties are common.
      scores[i] = static_cast<double>(rng.below(6)) / 5.0;
      labels[i] = static_cast<int>(rng.below(2));
    }
    int positives = 0;
    for (int l : labels) positives += l;
    if (positives == 0 || positives == static_cast<int>(n)) continue;
    const auto records = fdtest::make_records(scores, labels);
    const double diff = std::abs(mt::average_precision(records) - fdtest::brute_force_ap(scores, labels));
    worst = std::max(worst, diff);
    c.expect(diff < 1e-12, "set " + std::to_string(sets) + fmt(" diff %.3g", diff));
    ++sets;
  }
  const std::vector<double> ex_scores = {0.9, 0.8, 0.7};
  const std::vector<int> ex_labels = {1, 0, 1};
  const double ex = mt::average_precision(fdtest::make_records(ex_scores, ex_labels));
  c.expect(std::abs(ex - 5.0 / 6.0) < 1e-12, fmt("worked example gave %.15f", ex));
  return c.outcome("1000 sets, max diff " + fmt("%.1e", worst) + ", worked example " + fmt("%.4f", ex));
}

mt::AggregateReport aggregate_percent(std::span<const double> accs) {
  std::map<std::string, mt::MetricsReport> groups;
  for (size_t i = 0; i < accs.size(); ++i) {
    char id[24];
    std::snprintf(id, sizeof(id), "g%02zu", i);
    groups[id].accuracy = accs[i] / 100.0;
  }
  return mt::aggregate(groups);
}

Outcome aggregation_arithmetic() {
  Checks c;
  const auto t1 = aggregate_percent(fdtest::kDatasetAccuracies);
  const double t1_mean = 100 * t1.mean_accuracy;
  const double t1_std = 100 * *t1.std_accuracy;
  c.expect(std::abs(t1_mean - 80.86) <= 0.01, fmt("dataset mean %.4f vs 80.86", t1_mean));
  c.expect(std::abs(t1_std - 3.93) <= 0.01, fmt("dataset STD %.4f vs 3.93", t1_std));
  const auto t2 = aggregate_percent(fdtest::kOmniGenAccuracies);
  const double t2_mean = 100 * t2.mean_accuracy;
  const double t2_std = 100 * *t2.std_accuracy;
  c.expect(std::abs(t2_mean - 97.38) <= 0.01, fmt("generator mean %.4f vs 97.38", t2_mean));
  c.expect(std::abs(t2_std - 3.26) <= 0.01, fmt("generator STD %.4f vs 3.26", t2_std));
  return c.outcome("datasets " + fmt("%.4f", t1_mean) + " +- " + fmt("%.4f", t1_std) + ", generators " +
                   fmt("%.4f", t2_mean) + " +- " + fmt("%.4f", t2_std));
}

// Shared by the end-to-end and robustness criteria.
struct ToyRun {
  fdtest::fs::path manifest;
  fdtest::fs::path checkpoint;
  pl::EvalSummary eval;
};

pl::RunConfig toy_config(const fdtest::fs::path& run_dir) {
  pl::RunConfig cfg;
  cfg.run_dir = run_dir;
  cfg.semantic = "toy:8:1";
  cfg.structural = "toy:12:2";
  cfg.train.epochs = 10;
  cfg.train.augment_probability = 0.0;
  cfg.depths = {4};
  return cfg;
}

Outcome end_to_end(const fdtest::TempDir& dir, ToyRun& out) {
  Checks c;
  const auto start = std::chrono::steady_clock::now();
  out.manifest = fdtest::write_dataset(
      dir.path() / "images",
      {{"train_domain", {"sd14", "sd21"}, 75, 150, ds::Split::kTrain},
       {"heldout_a", {"flux"}, 75, 75, ds::Split::kTest},
       {"heldout_b", {"midjourney"}, 75, 75, ds::Split::kTest}},
      17);
  auto extract = toy_config(dir / "extract");
  extract.manifest = out.manifest;
  const auto ex = pl::cmd_extract(extract);
  c.expect(ex.rows == 600 && ex.skipped.empty(), "extracted " + std::to_string(ex.rows) + " rows");

  auto train = toy_config(dir / "train");
  train.caches = {ex.cache};
  const auto tr = pl::cmd_train(train);
  c.expect(tr.split && tr.split->disjoint(), "train/test split not disjoint");
  out.checkpoint = tr.heads.at(0).checkpoint;

  auto eval = toy_config(dir / "eval");
  eval.caches = {ex.cache};
  eval.checkpoint = out.checkpoint;
  out.eval = pl::cmd_eval(eval);
  const double secs = seconds_since(start);

  const std::vector<fd::metrics::EvalRecord>& records = out.eval.records;
  const double acc = mt::accuracy(records);
  const double ap = mt::average_precision(records);
  c.expect(records.size() == 300, std::to_string(records.size()) + " test records");
  c.expect(acc >= 0.99, fmt("accuracy %.4f", acc));
  c.expect(ap >= 0.999, fmt("AP %.5f", ap));
  c.expect(secs < 60.0, fmt("took %.1f s", secs));
  return c.outcome("600 images, test acc " + fmt("%.4f", acc) + " AP " + fmt("%.5f", ap) +
                   fmt(", %.2f s", secs));
}

bool same_report(const mt::AggregateReport& a, const mt::AggregateReport& b) {
  if (a.groups.size() != b.groups.size() || a.mean_accuracy != b.mean_accuracy || a.mean_ap != b.mean_ap) {
    return false;
  }
  for (const auto& [id, r] : a.groups) {
    const auto it = b.groups.find(id);
    if (it == b.groups.end() || it->second.accuracy != r.accuracy ||
        it->second.average_precision != r.average_precision) {
      return false;
    }
  }
  return true;
}

Outcome robustness_integrity(const fdtest::TempDir& dir, const ToyRun& toy) {
  Checks c;
  auto cfg = toy_config(dir / "robustness");
  cfg.manifest = toy.manifest;
  cfg.checkpoint = toy.checkpoint;
  cfg.perturbations = {im::PerturbSpec::identity()};
  const auto robust = pl::cmd_robustness(cfg);
  c.expect(same_report(robust.columns.at(0).report, toy.eval.report),
           "identity column differs from the clean evaluation");

  int worst_lsb = 0;
  for (uint8_t level : {0, 1, 77, 128, 200, 255}) {
    const auto img = fdtest::constant_image(37, 23, level, static_cast<uint8_t>(255 - level), level);
    for (double sigma : {0.5, 1.0, 2.0, 3.0}) {
      const auto once = im::gaussian_blur(img, sigma);
      const auto twice = im::gaussian_blur(once, sigma);
      for (size_t i = 0; i < img.data.size(); ++i) {
        worst_lsb = std::max({worst_lsb, std::abs(int(once.data[i]) - int(img.data[i])),
                              std::abs(int(twice.data[i]) - int(once.data[i]))});
      }
    }
  }
  c.expect(worst_lsb <= 1, "constant blur moved " + std::to_string(worst_lsb) + " LSB");

  bool jpeg_stable = true;
  const auto textured = fdtest::separable_image(true, 3, 96);
  for (int qf : {95, 75, 50}) {
    jpeg_stable = jpeg_stable && im::jpeg_perturb(textured, qf).data == im::jpeg_perturb(textured, qf).data &&
                  im::encode_jpeg(textured, qf) == im::encode_jpeg(textured, qf);
  }
  c.expect(jpeg_stable, "JPEG round trip not deterministic");

  const auto grid = mt::default_robustness_grid();
  std::vector<mt::RobustnessColumn> columns;
  for (const auto& p : grid) columns.push_back({p, toy.eval.report});
  const auto table = mt::robustness_table(columns, "Dataset");
  c.expect(grid.size() == 7 && table.header.size() == 8,
           "grid has " + std::to_string(grid.size()) + " perturbations");
  std::string header;
  for (size_t i = 1; i < table.header.size(); ++i) header += (i > 1 ? "|" : "") + table.header[i];
  return c.outcome("identity bit-exact, blur max " + std::to_string(worst_lsb) + " LSB, grid " + header);
}

Outcome bce_numerics() {
  Checks c;
  double worst = 0.0;
  for (double x = -30.0; x <= 30.0; x += 1.0 / 64) {
    for (auto label : {fd::Label::kReal, fd::Label::kFake}) {
      const double diff = std::abs(hd::bce_with_logits(x, label) - fdtest::naive_bce(x, label));
      worst = std::max(worst, diff);
      c.expect(diff <= 1e-12, fmt("logit %.4f", x) + fmt(" diff %.3g", diff));
    }
  }
  for (double x : {-1e4, -5e3, -700.0, -40.0, 40.0, 700.0, 5e3, 1e4}) {
    for (auto label : {fd::Label::kReal, fd::Label::kFake}) {
      c.expect(std::isfinite(hd::bce_with_logits(x, label)), fmt("non-finite at %.0f", x));
    }
  }
  c.expect(hd::sigmoid(0.0) == 0.5, "sigmoid(0) != 0.5");
  return c.outcome("max diff vs quad-precision naive formula " + fmt("%.1e", worst) +
                   ", finite to |logit| 1e4, sigmoid(0) = " + fmt("%.17g", hd::sigmoid(0.0)));
}

Outcome tsne_criterion() {
  Checks c;
  double grad = 0.0;
  for (uint64_t seed = 0; seed < 5; ++seed) grad = std::max(grad, fdtest::tsne_gradient_check(12, seed));
  c.expect(grad < 1e-3, fmt("gradient rel err %.3g", grad));

  const auto clusters = fdtest::gaussian_clusters(100, 50, 11);
  ts::TsneConfig cfg;
  cfg.seed = 5;
  const auto start = std::chrono::steady_clock::now();
  const auto r = ts::run_tsne(clusters.points, clusters.n, clusters.dim, cfg);
  const double secs = seconds_since(start);
  double min_kl = r.kl_history.front();
  for (double kl : r.kl_history) min_kl = std::min(min_kl, kl);
  c.expect(min_kl >= 0.0, fmt("negative KL %.3g", min_kl));
  const double purity = ts::nearest_centroid_purity(r.embedding, clusters.labels);
  c.expect(purity >= 0.95, fmt("purity %.3f", purity));
  c.expect(secs < 60.0, fmt("took %.1f s", secs));
  return c.outcome(fmt("grad rel err %.1e", grad) + fmt(", n=300 purity %.3f", purity) +
                   fmt(", min KL %.4f", min_kl) + fmt(", %.2f s", secs));
}

Outcome split_checker() {
  Checks c;
  const std::string dir = std::string(FD_DATA_DIR) + "/manifests/";
  std::vector<ds::ManifestEntry> train;
  for (const auto& row : ds::load_composition(dir + "train.tsv")) {
    train.push_back({row.dataset_id + "/" + row.generator_id + "/" + row.category, row.label,
                     row.generator_id, row.dataset_id, ds::Split::kTrain});
  }
  const auto test = ds::expand_composition(ds::load_composition(dir + "omnigen.tsv"), ds::Split::kTest);
  const auto report = mt::assert_two_axis_split(train, test, mt::SplitMode::kAudit);
  c.expect(report.disjoint(), "OmniGen overlap: " + report.describe());
  c.expect(ds::composition_generators(ds::load_composition(dir + "train.tsv")).size() == 2,
           "training generators are not exactly two");

  auto injected = train;
  injected.push_back({"x.png", fd::Label::kFake, "flux-1", "train-extra", ds::Split::kTrain});
  bool caught = false;
  try {
    mt::assert_two_axis_split(injected, test, mt::SplitMode::kStrict);
  } catch (const fd::Error& e) {
    caught = e.code() == fd::ErrorCode::kSplitViolation;
  }
  c.expect(caught, "injected generator overlap not detected");
  auto domain = train;
  domain.push_back({"y.png", fd::Label::kFake, "sdv1.4", "omnigen", ds::Split::kTrain});
  c.expect(!mt::assert_two_axis_split(domain, test, mt::SplitMode::kAudit).disjoint(),
           "injected dataset overlap not detected");
  return c.outcome("train {sdv1.4, sd-v2.1} vs " + std::to_string(test.size()) +
                   " OmniGen rows disjoint; injected overlaps detected");
}

std::string expected_text(const pg::SlotChoices& s) {
  return "A richly detailed, high-resolution and photorealistic image depicting: " + s[0] +
         " during the " + s[1] + ". The scene includes " + s[2] + ", " + s[3] +
         ", and lifelike rendering. The image style resembles " + s[4] + ". Use " + s[5] + ".";
}

Outcome prompt_generation() {
  Checks c;
  const auto pools = pg::load_pools(std::string(FD_DATA_DIR) + "/pools");
  const auto gens = ds::composition_generators(
      ds::load_composition(std::string(FD_DATA_DIR) + "/manifests/omnigen.tsv"));
  size_t total = 0;
  for (size_t g = 0; g < gens.size(); ++g) {
    const uint64_t seed = fd::derive_seed(7, fd::fnv1a64(gens[g]));
    const auto batch = pg::generate_batch(pools, 1000, seed, gens[g]);
    const auto again = pg::generate_batch(pools, 1000, seed, gens[g]);
    c.expect(batch.records.size() == 1000, gens[g] + " size");
    for (size_t i = 0; i < batch.records.size(); ++i) {
      const auto& r = batch.records[i];
      bool filled = true;
      for (const auto& s : r.slots) filled = filled && !s.empty();
      c.expect(filled, gens[g] + " record with an empty slot");
      c.expect(r.text == expected_text(r.slots), gens[g] + " record " + std::to_string(i) + " text");
      c.expect(pg::to_json_line(r) == pg::to_json_line(again.records[i]),
               gens[g] + " record " + std::to_string(i) + " not reproducible");
    }
    total += batch.records.size();
  }

  // 10000 draws from 4-element pools.
  pg::PromptPools four;
  for (size_t k = 0; k < pg::kSlotCount; ++k) {
    for (int v = 0; v < 4; ++v) four.slots[k].push_back(std::to_string(v));
  }
  fd::Rng rng(99);
  std::vector<std::map<std::string, int>> counts(pg::kSlotCount);
  for (int i = 0; i < 10000; ++i) {
    const auto r = pg::render_prompt(four, rng);
    for (size_t k = 0; k < pg::kSlotCount; ++k) counts[k][r.slots[k]]++;
  }
  double lo = 1.0, hi = 0.0;
  for (const auto& m : counts) {
    for (const auto& [_, n] : m) {
      lo = std::min(lo, n / 10000.0);
      hi = std::max(hi, n / 10000.0);
    }
  }
  c.expect(lo >= 0.225 && hi <= 0.275, fmt("marginals in [%.4f, ", lo) + fmt("%.4f]", hi));
  return c.outcome(std::to_string(total) + " prompts over " + std::to_string(gens.size()) +
                   " generators, marginals in " + fmt("[%.4f, ", lo) + fmt("%.4f]", hi));
}

}  // namespace

int main() {
  fdtest::TempDir dir("acceptance");
  ToyRun toy;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient-correctness", gradient_correctness},
      {"ap-oracle", ap_oracle},
      {"aggregation-arithmetic", aggregation_arithmetic},
      {"toy-end-to-end", [&] { return end_to_end(dir, toy); }},
      {"robustness-integrity", [&] { return robustness_integrity(dir, toy); }},
      {"bce-sigmoid-numerics", bce_numerics},
      {"tsne", tsne_criterion},
      {"two-axis-split", split_checker},
      {"prompt-generation", prompt_generation},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
