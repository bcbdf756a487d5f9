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

#include "fusiondetect/manifest.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "file_util.h"
#include "fusiondetect/error.h"
#include "fusiondetect/rng.h"
#include "json.hpp"

namespace fusiondetect::datasets {
namespace {

using nlohmann::json;

std::string where(const std::string& source, int line) {
  return source + ":" + std::to_string(line);
}

std::string required_string(const json& obj, const char* key, const std::string& loc) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorCode::kParseError, loc + ": missing field '" + key + "'");
  if (!it->is_string()) fail(ErrorCode::kParseError, loc + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

std::string split_name(Split split) { return split == Split::kTrain ? "train" : "test"; }

std::filesystem::path Manifest::resolve(const ManifestEntry& entry) const {
  const std::filesystem::path p(entry.path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> Manifest::generators() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.label == Label::kFake && seen.insert(e.generator_id).second) {
      out.push_back(e.generator_id);
    }
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::istream& in, const std::string& source) {
  std::vector<ManifestEntry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (internal::trim(line).empty()) continue;
    const std::string loc = where(source, line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParseError, loc + ": " + e.what());
    }
    if (!obj.is_object()) fail(ErrorCode::kParseError, loc + ": expected a JSON object");

    ManifestEntry entry;
    entry.path = required_string(obj, "path", loc);
    const std::string label = required_string(obj, "label", loc);
    entry.generator_id = required_string(obj, "generator_id", loc);
    entry.dataset_id = required_string(obj, "dataset_id", loc);
    const std::string split = required_string(obj, "split", loc);

    if (label == "real") {
      entry.label = Label::kReal;
    } else if (label == "fake") {
      entry.label = Label::kFake;
    } else {
      fail(ErrorCode::kParseError, loc + ": label must be 'real' or 'fake'");
    }
    if (split == "train") {
      entry.split = Split::kTrain;
    } else if (split == "test") {
      entry.split = Split::kTest;
    } else {
      fail(ErrorCode::kParseError, loc + ": split must be 'train' or 'test'");
    }

    if (entry.path.empty()) fail(ErrorCode::kInvariantViolation, loc + ": empty path");
    if (entry.dataset_id.empty()) fail(ErrorCode::kInvariantViolation, loc + ": empty dataset_id");
    if (entry.label == Label::kReal && entry.generator_id != kRealGeneratorId) {
      fail(ErrorCode::kInvariantViolation,
           loc + ": real image must have generator_id \"real\", got \"" +
               entry.generator_id + "\"");
    }
    if (entry.label == Label::kFake &&
        (entry.generator_id.empty() || entry.generator_id == kRealGeneratorId)) {
      fail(ErrorCode::kInvariantViolation, loc + ": fake image needs a generator_id other than \"real\"");
    }
    if (!seen.emplace(entry.dataset_id, entry.path).second) {
      fail(ErrorCode::kInvariantViolation,
           loc + ": duplicate (dataset_id, path) (" + entry.dataset_id + ", " + entry.path + ")");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) fail(ErrorCode::kFileNotFound, path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  Manifest manifest;
  manifest.base_dir = path.parent_path();
  manifest.entries = parse_manifest(in, path.string());
  return manifest;
}

std::string to_json_line(const ManifestEntry& entry) {
  // Fixed key order keeps files diffable.
  std::ostringstream os;
  os << "{\"path\":" << json(entry.path).dump()
     << ",\"label\":" << json(std::string(label_name(entry.label))).dump()
     << ",\"generator_id\":" << json(entry.generator_id).dump()
     << ",\"dataset_id\":" << json(entry.dataset_id).dump()
     << ",\"split\":" << json(split_name(entry.split)).dump() << "}";
  return os.str();
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::string text;
  for (const auto& e : entries) text += to_json_line(e) + "\n";
  internal::write_text_file(path, text);
}

std::vector<ManifestEntry> filter_split(const std::vector<ManifestEntry>& entries,
                                        Split split) {
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [&](const ManifestEntry& e) { return e.split == split; });
  return out;
}

void SamplingSpec::validate() const {
  if (per_generator_count < 1) {
    fail(ErrorCode::kInvalidArgument, "per_generator_count must be >= 1");
  }
}

namespace {

// Partial Fisher-Yates; returns the chosen positions sorted ascending.
std::vector<size_t> choose(const std::vector<size_t>& pool, size_t k, Rng& rng) {
  std::vector<size_t> work = pool;
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + rng.below(work.size() - i);
    std::swap(work[i], work[j]);
  }
  work.resize(k);
  std::sort(work.begin(), work.end());
  return work;
}

}  // namespace

std::vector<ManifestEntry> balanced_sample(const std::vector<ManifestEntry>& entries,
                                           const SamplingSpec& spec) {
  spec.validate();
  std::map<std::string, std::vector<size_t>> by_generator;
  std::vector<size_t> reals;
  std::vector<std::string> generator_order;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].label == Label::kReal) {
      reals.push_back(i);
    } else {
      auto [it, inserted] = by_generator.try_emplace(entries[i].generator_id);
      if (inserted) generator_order.push_back(entries[i].generator_id);
      it->second.push_back(i);
    }
  }
  const size_t need = static_cast<size_t>(spec.per_generator_count);
  std::string deficits;
  for (const auto& g : generator_order) {
    const size_t have = by_generator[g].size();
    if (have < need) {
      deficits += " " + g + "(have " + std::to_string(have) + ", need " +
                  std::to_string(need) + ")";
    }
  }
  const size_t total_fake = need * generator_order.size();
  if (spec.balance_real_fake && reals.size() < total_fake) {
    deficits += " real(have " + std::to_string(reals.size()) + ", need " +
                std::to_string(total_fake) + ")";
  }
  if (!deficits.empty()) fail(ErrorCode::kInsufficientImages, "insufficient images:" + deficits);

  std::vector<size_t> selected;
  // Each generator gets its own stream so adding a generator does not
  // reshuffle the others.
  for (const auto& g : generator_order) {
    Rng rng(derive_seed(spec.seed, fnv1a64(g)));
    const auto picked = choose(by_generator[g], need, rng);
    selected.insert(selected.end(), picked.begin(), picked.end());
  }
  if (spec.balance_real_fake) {
    Rng rng(derive_seed(spec.seed, 0x7265616cULL));
    const auto picked = choose(reals, total_fake, rng);
    selected.insert(selected.end(), picked.begin(), picked.end());
  } else {
    selected.insert(selected.end(), reals.begin(), reals.end());
  }
  std::sort(selected.begin(), selected.end());
  std::vector<ManifestEntry> out;
  out.reserve(selected.size());
  for (size_t i : selected) out.push_back(entries[i]);
  return out;
}

}  // namespace fusiondetect::datasets
