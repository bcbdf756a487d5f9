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

// fdetect: command-line front end for the FusionDetect pipeline.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fusiondetect/error.h"
#include "fusiondetect/pipeline.h"

namespace {

using fusiondetect::pipeline::RunConfig;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

const char* kConfigHelp = R"(Configuration
  Settings come from built-in defaults, then --config FILE, then flags;
  later sources win. A config file holds one "key = value" per line; blank
  lines and lines starting with '#' are ignored. Every flag --some-key has
  the config key some_key. List values are comma separated.

  Backbones are "toy:<dim>:<seed>" or the path of an export descriptor.
  Perturbations use tokens identity, jpeg:<qf>, blur:<sigma>.

Exit codes
  0 success, 1 invalid input (flags, config, missing files, manifest,
  split check),
  2 runtime or data error.

Environment
  FD_THREADS caps worker threads.)";

struct Command {
  const char* name;
  const char* description;
  std::vector<const char*> keys;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> kCommands = {
      {"extract", "Run a manifest through the backbones into a feature cache",
       {"run_dir", "manifest", "semantic", "structural", "backbones", "l2_normalize",
        "sample_per_generator", "balance_real_fake", "sample_seed", "augment_probability", "seed"}},
      {"train", "Train classifier heads on a feature cache",
       {"run_dir", "caches", "test_manifest", "semantic", "structural", "backbones",
        "l2_normalize", "depths", "hidden_widths", "epochs", "batch_size", "seed", "lr", "beta1",
        "beta2", "eps", "weight_decay", "split_check"}},
      {"eval", "Score test rows and write Acc / AP tables",
       {"run_dir", "caches", "manifest", "test_manifest", "semantic", "structural", "backbones",
        "l2_normalize", "checkpoint", "group_by", "pool_mode", "threshold", "title"}},
      {"robustness", "Evaluate under the JPEG / blur perturbation grid",
       {"run_dir", "manifest", "test_manifest", "semantic", "structural", "backbones",
        "l2_normalize", "checkpoint", "perturbations", "group_by", "pool_mode", "threshold",
        "title"}},
      {"tsne", "Project cached features to 2-D and plot them",
       {"run_dir", "caches", "tsne_perplexity", "tsne_learning_rate", "tsne_iterations",
        "tsne_seed", "tsne_per_dataset"}},
      {"prompts", "Generate seeded prompts and a generation manifest stub",
       {"run_dir", "pools", "prompt_count", "prompt_seed", "generators", "prompt_dataset"}},
      {"report", "Render stored results or a values CSV as tables",
       {"run_dir", "report_inputs", "values", "title"}},
  };
  return kCommands;
}

std::string flag_name(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

std::string default_value(const RunConfig& config, const std::string& key) {
  for (const auto& [k, v] : config.resolved()) {
    if (k == key) return v;
  }
  return "";
}

int run(int argc, char** argv) {
  CLI::App app{"FusionDetect: synthetic-image detection on fused frozen-backbone features"};
  app.footer(kConfigHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", "fdetect 0.1.0");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress messages");
  app.fallthrough();

  RunConfig defaults;
#ifdef FD_DATA_DIR
  defaults.pools = std::string(FD_DATA_DIR) + "/pools";
#endif

  std::map<std::string, std::string> config_files;
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::vector<std::string> overrides;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.description);
    sub->footer(kConfigHelp);
    sub->add_option("-c,--config", config_files[cmd.name], "Config file of key = value lines")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", overrides, "Extra key=value setting (repeatable)");
    auto& values = flag_values[cmd.name];
    for (const char* key : cmd.keys) {
      const std::string fallback = default_value(defaults, key);
      std::string help = std::string("config key ") + key;
      if (!fallback.empty()) help += " (default: " + fallback + ")";
      sub->add_option(flag_name(key), values[key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  const Command* chosen = nullptr;
  for (const auto& cmd : commands()) {
    if (app.got_subcommand(cmd.name)) chosen = &cmd;
  }
  CLI::App* sub = app.get_subcommand(chosen->name);

  fusiondetect::pipeline::Logger log;
  if (!quiet) log = [](const std::string& msg) { std::cerr << "[fdetect] " << msg << "\n"; };

  try {
    RunConfig config = defaults;
    if (!config_files[chosen->name].empty()) {
      fusiondetect::pipeline::apply_config_file(config, config_files[chosen->name]);
    }
    for (const char* key : chosen->keys) {
      if (sub->count(flag_name(key)) > 0) config.set(key, flag_values[chosen->name][key]);
    }
    for (const auto& kv : overrides) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        fusiondetect::fail(fusiondetect::ErrorCode::kInvalidArgument,
                           "--set expects key=value, got '" + kv + "'");
      }
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    const std::string name = chosen->name;
    if (name == "extract") {
      const auto s = fusiondetect::pipeline::cmd_extract(config, log);
      std::cout << s.cache.string() << "\t" << s.rows << " rows\t" << s.skipped.size()
                << " skipped\n";
    } else if (name == "train") {
      const auto s = fusiondetect::pipeline::cmd_train(config, log);
      for (const auto& h : s.heads) {
        const auto& last = h.result.history.back();
        std::cout << h.checkpoint.string() << "\tdepth " << h.depth << "\tloss " << last.mean_loss
                  << "\taccuracy " << last.accuracy << "\n";
      }
    } else if (name == "eval") {
      const auto s = fusiondetect::pipeline::cmd_eval(config, log);
      std::cout << "mean Acc / AP: "
                << fusiondetect::metrics::format_cell(s.report.mean_accuracy, s.report.mean_ap)
                << "\n";
    } else if (name == "robustness") {
      const auto s = fusiondetect::pipeline::cmd_robustness(config, log);
      std::cout << s.table.to_markdown();
    } else if (name == "tsne") {
      const auto s = fusiondetect::pipeline::cmd_tsne(config, log);
      std::cout << s.entries.size() << " points, final KL " << s.result.kl_history.back() << "\n";
    } else if (name == "prompts") {
      const auto s = fusiondetect::pipeline::cmd_prompts(config, log);
      size_t total = 0;
      for (const auto& b : s.batches) total += b.records.size();
      std::cout << total << " prompts for " << s.batches.size() << " generators\n";
    } else if (name == "report") {
      const auto s = fusiondetect::pipeline::cmd_report(config, log);
      std::cout << s.table.to_markdown();
    }
  } catch (const fusiondetect::Error& e) {
    std::cerr << "fdetect " << chosen->name << ": " << e.what() << "\n";
    return fusiondetect::is_validation_error(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "fdetect " << chosen->name << ": " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
