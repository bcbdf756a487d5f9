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

#include "fusiondetect/composition.h"

#include <cstdio>
#include <set>
#include <sstream>

#include "file_util.h"
#include "fusiondetect/error.h"

namespace fusiondetect::datasets {

std::vector<CompositionRow> parse_composition(std::istream& in, const std::string& source) {
  std::vector<CompositionRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = internal::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string loc = source + ":" + std::to_string(line_no);
    const auto cells = internal::split(t, '\t');
    if (cells.size() != 7) {
      fail(ErrorCode::kParseError, loc + ": expected 7 tab-separated columns, got " +
                                       std::to_string(cells.size()));
    }
    CompositionRow row;
    row.dataset_id = internal::trim(cells[0]);
    row.generator_id = internal::trim(cells[1]);
    const std::string label = internal::trim(cells[2]);
    if (label == "real") {
      row.label = Label::kReal;
    } else if (label == "fake") {
      row.label = Label::kFake;
    } else {
      fail(ErrorCode::kParseError, loc + ": label must be real or fake, got '" + label + "'");
    }
    row.category = internal::trim(cells[3]);
    const std::string count = internal::trim(cells[4]);
    size_t used = 0;
    try {
      row.count = std::stoll(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != count.size() || row.count < 0) {
      fail(ErrorCode::kParseError, loc + ": count must be a non-negative integer, got '" + count + "'");
    }
    row.resolution = internal::trim(cells[5]);
    row.source = internal::trim(cells[6]);
    if (row.dataset_id.empty() || row.generator_id.empty()) {
      fail(ErrorCode::kInvariantViolation, loc + ": dataset_id and generator_id must be set");
    }
    if ((row.label == Label::kReal) != (row.generator_id == kRealGeneratorId)) {
      fail(ErrorCode::kInvariantViolation,
           loc + ": generator_id must be \"real\" exactly for real rows");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CompositionRow> load_composition(const std::filesystem::path& path) {
  std::istringstream in(internal::read_text_file(path));
  return parse_composition(in, path.string());
}

int64_t fake_count(const std::vector<CompositionRow>& rows) {
  int64_t total = 0;
  for (const auto& r : rows) {
    if (r.label == Label::kFake) total += r.count;
  }
  return total;
}

int64_t real_count(const std::vector<CompositionRow>& rows) {
  int64_t total = 0;
  for (const auto& r : rows) {
    if (r.label == Label::kReal) total += r.count;
  }
  return total;
}

std::vector<std::string> composition_generators(const std::vector<CompositionRow>& rows) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (r.label == Label::kFake && seen.insert(r.generator_id).second) out.push_back(r.generator_id);
  }
  return out;
}

std::vector<ManifestEntry> expand_composition(const std::vector<CompositionRow>& rows,
                                              Split split) {
  std::vector<ManifestEntry> out;
  for (const auto& r : rows) {
    for (int64_t i = 0; i < r.count; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%06lld.png", static_cast<long long>(i));
      ManifestEntry e;
      e.path = r.dataset_id + "/" + r.generator_id + "/" + r.category + "/" + name;
      e.label = r.label;
      e.generator_id = r.generator_id;
      e.dataset_id = r.dataset_id;
      e.split = split;
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace fusiondetect::datasets
