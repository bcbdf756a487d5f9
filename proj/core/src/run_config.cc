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

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "file_util.h"
#include "fusiondetect/error.h"
#include "fusiondetect/mlp.h"
#include "fusiondetect/pipeline.h"
#include "fusiondetect/report.h"

namespace fusiondetect::pipeline {
namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  fail(ErrorCode::kInvalidArgument,
       "config '" + key + "': cannot parse '" + value + "' as " + expected);
}

int64_t to_int(const std::string& key, const std::string& value) {
  int64_t out = 0;
  const auto s = internal::trim(value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, value, "an integer");
  return out;
}

uint64_t to_u64(const std::string& key, const std::string& value) {
  uint64_t out = 0;
  const auto s = internal::trim(value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, value, "an unsigned integer");
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  const auto s = internal::trim(value);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, value, "a number");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  const auto s = internal::trim(value);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, value, "a boolean");
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : internal::split(value, ',')) {
    const auto t = internal::trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : to_list(value)) out.push_back(static_cast<int>(to_int(key, item)));
  return out;
}

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream os;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) os << ",";
    if constexpr (std::is_same_v<T, std::filesystem::path>) {
      os << items[i].string();
    } else {
      os << items[i];
    }
  }
  return os.str();
}

std::string join_perturbations(const std::vector<imaging::PerturbSpec>& specs) {
  std::vector<std::string> tokens;
  for (const auto& s : specs) tokens.push_back(s.token());
  return join(tokens);
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      {"run_dir", [](RunConfig& c, auto&, auto& v) { c.run_dir = v; },
       [](const RunConfig& c) { return c.run_dir.string(); }},
      {"semantic", [](RunConfig& c, auto&, auto& v) { c.semantic = v; },
       [](const RunConfig& c) { return c.semantic; }},
      {"structural", [](RunConfig& c, auto&, auto& v) { c.structural = v; },
       [](const RunConfig& c) { return c.structural; }},
      {"backbones",
       [](RunConfig& c, auto&, auto& v) { c.backbones = head::parse_backbone_mask(v); },
       [](const RunConfig& c) { return head::backbone_mask_name(c.backbones); }},
      {"l2_normalize", [](RunConfig& c, auto& k, auto& v) { c.l2_normalize = to_bool(k, v); },
       [](const RunConfig& c) { return std::string(c.l2_normalize ? "true" : "false"); }},
      {"depths",
       [](RunConfig& c, auto& k, auto& v) {
         auto depths = to_int_list(k, v);
         if (depths.empty()) bad_value(k, v, "a list of depths");
         for (int d : depths) {
           if (d < head::kMinDepth || d > head::kMaxDepth) bad_value(k, v, "depths in [1, 5]");
         }
         c.depths = depths;
       },
       [](const RunConfig& c) { return join(c.depths); }},
      {"hidden_widths",
       [](RunConfig& c, auto& k, auto& v) { c.hidden_widths = to_int_list(k, v); },
       [](const RunConfig& c) { return join(c.hidden_widths); }},
      {"epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs = static_cast<int>(to_int(k, v)); },
       [](const RunConfig& c) { return std::to_string(c.train.epochs); }},
      {"batch_size",
       [](RunConfig& c, auto& k, auto& v) { c.train.batch_size = static_cast<int>(to_int(k, v)); },
       [](const RunConfig& c) { return std::to_string(c.train.batch_size); }},
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.train.seed = to_u64(k, v); },
       [](const RunConfig& c) { return std::to_string(c.train.seed); }},
      {"lr", [](RunConfig& c, auto& k, auto& v) { c.train.optimizer.lr = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.train.optimizer.lr); }},
      {"beta1", [](RunConfig& c, auto& k, auto& v) { c.train.optimizer.beta1 = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.train.optimizer.beta1); }},
      {"beta2", [](RunConfig& c, auto& k, auto& v) { c.train.optimizer.beta2 = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.train.optimizer.beta2); }},
      {"eps", [](RunConfig& c, auto& k, auto& v) { c.train.optimizer.eps = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.train.optimizer.eps); }},
      {"weight_decay",
       [](RunConfig& c, auto& k, auto& v) { c.train.optimizer.weight_decay = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.train.optimizer.weight_decay); }},
      {"augment_probability",
       [](RunConfig& c, auto& k, auto& v) { c.train.augment_probability = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.train.augment_probability); }},
      {"sample_per_generator",
       [](RunConfig& c, auto& k, auto& v) {
         const int64_t n = to_int(k, v);
         if (n < 0) bad_value(k, v, "a count >= 0");
         c.sample = n > 0;
         if (n > 0) c.sampling.per_generator_count = static_cast<int>(n);
       },
       [](const RunConfig& c) {
         return std::to_string(c.sample ? c.sampling.per_generator_count : 0);
       }},
      {"balance_real_fake",
       [](RunConfig& c, auto& k, auto& v) { c.sampling.balance_real_fake = to_bool(k, v); },
       [](const RunConfig& c) { return std::string(c.sampling.balance_real_fake ? "true" : "false"); }},
      {"sample_seed", [](RunConfig& c, auto& k, auto& v) { c.sampling.seed = to_u64(k, v); },
       [](const RunConfig& c) { return std::to_string(c.sampling.seed); }},
      {"manifest", [](RunConfig& c, auto&, auto& v) { c.manifest = v; },
       [](const RunConfig& c) { return c.manifest.string(); }},
      {"test_manifest", [](RunConfig& c, auto&, auto& v) { c.test_manifest = v; },
       [](const RunConfig& c) { return c.test_manifest.string(); }},
      {"caches",
       [](RunConfig& c, auto&, auto& v) {
         c.caches.clear();
         for (const auto& item : to_list(v)) c.caches.emplace_back(item);
       },
       [](const RunConfig& c) { return join(c.caches); }},
      {"checkpoint", [](RunConfig& c, auto&, auto& v) { c.checkpoint = v; },
       [](const RunConfig& c) { return c.checkpoint.string(); }},
      {"perturbations",
       [](RunConfig& c, auto& k, auto& v) {
         c.perturbations.clear();
         for (const auto& item : to_list(v)) c.perturbations.push_back(imaging::PerturbSpec::parse(item));
         if (c.perturbations.empty()) bad_value(k, v, "a perturbation list");
       },
       [](const RunConfig& c) { return join_perturbations(c.perturbations); }},
      {"group_by", [](RunConfig& c, auto&, auto& v) { c.group_by = metrics::parse_group_by(v); },
       [](const RunConfig& c) { return metrics::group_by_name(c.group_by); }},
      {"pool_mode", [](RunConfig& c, auto&, auto& v) { c.pool_mode = metrics::parse_pool_mode(v); },
       [](const RunConfig& c) { return metrics::pool_mode_name(c.pool_mode); }},
      {"threshold", [](RunConfig& c, auto& k, auto& v) { c.threshold = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.threshold); }},
      {"split_check", [](RunConfig& c, auto&, auto& v) { c.split_check = parse_split_check(v); },
       [](const RunConfig& c) { return split_check_name(c.split_check); }},
      {"tsne_perplexity", [](RunConfig& c, auto& k, auto& v) { c.tsne.perplexity = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.tsne.perplexity); }},
      {"tsne_learning_rate",
       [](RunConfig& c, auto& k, auto& v) { c.tsne.learning_rate = to_double(k, v); },
       [](const RunConfig& c) { return fmt(c.tsne.learning_rate); }},
      {"tsne_iterations",
       [](RunConfig& c, auto& k, auto& v) { c.tsne.iterations = static_cast<int>(to_int(k, v)); },
       [](const RunConfig& c) { return std::to_string(c.tsne.iterations); }},
      {"tsne_seed", [](RunConfig& c, auto& k, auto& v) { c.tsne.seed = to_u64(k, v); },
       [](const RunConfig& c) { return std::to_string(c.tsne.seed); }},
      {"tsne_per_dataset",
       [](RunConfig& c, auto& k, auto& v) {
         const int64_t n = to_int(k, v);
         if (n < 0) bad_value(k, v, "a count >= 0");
         c.tsne_per_dataset = static_cast<int>(n);
       },
       [](const RunConfig& c) { return std::to_string(c.tsne_per_dataset); }},
      {"pools", [](RunConfig& c, auto&, auto& v) { c.pools = v; },
       [](const RunConfig& c) { return c.pools.string(); }},
      {"prompt_count", [](RunConfig& c, auto& k, auto& v) { c.prompt_count = to_int(k, v); },
       [](const RunConfig& c) { return std::to_string(c.prompt_count); }},
      {"prompt_seed", [](RunConfig& c, auto& k, auto& v) { c.prompt_seed = to_u64(k, v); },
       [](const RunConfig& c) { return std::to_string(c.prompt_seed); }},
      {"generators", [](RunConfig& c, auto&, auto& v) { c.generators = to_list(v); },
       [](const RunConfig& c) { return join(c.generators); }},
      {"prompt_dataset", [](RunConfig& c, auto&, auto& v) { c.prompt_dataset = v; },
       [](const RunConfig& c) { return c.prompt_dataset; }},
      {"report_inputs", [](RunConfig& c, auto&, auto& v) { c.report_inputs = to_list(v); },
       [](const RunConfig& c) { return join(c.report_inputs); }},
      {"values", [](RunConfig& c, auto&, auto& v) { c.values = v; },
       [](const RunConfig& c) { return c.values.string(); }},
      {"title", [](RunConfig& c, auto&, auto& v) { c.title = v; },
       [](const RunConfig& c) { return c.title; }},
  };
  return kFields;
}

}  // namespace

std::string split_check_name(SplitCheck mode) {
  switch (mode) {
    case SplitCheck::kStrict: return "strict";
    case SplitCheck::kAudit: return "audit";
    case SplitCheck::kOff: return "off";
  }
  return "strict";
}

SplitCheck parse_split_check(const std::string& name) {
  if (name == "strict") return SplitCheck::kStrict;
  if (name == "audit") return SplitCheck::kAudit;
  if (name == "off") return SplitCheck::kOff;
  fail(ErrorCode::kInvalidArgument, "split_check must be strict, audit or off");
}

RunConfig::RunConfig() : perturbations(metrics::default_robustness_grid()) {}

void RunConfig::set(const std::string& key, const std::string& value) {
  // Singular aliases.
  if (key == "depth") return set("depths", value);
  if (key == "cache") return set("caches", value);
  if (key == "generator") return set("generators", value);
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, key, internal::trim(value));
      return;
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
}

metrics::ConfigEntries RunConfig::resolved() const {
  metrics::ConfigEntries out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::istringstream in(internal::read_text_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = internal::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kParseError,
           path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      config.set(internal::trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.message());
    }
  }
}

}  // namespace fusiondetect::pipeline
