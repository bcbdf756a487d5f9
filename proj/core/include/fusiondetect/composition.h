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

#ifndef FUSIONDETECT_COMPOSITION_H_
#define FUSIONDETECT_COMPOSITION_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fusiondetect/label.h"
#include "fusiondetect/manifest.h"

namespace fusiondetect::datasets {

// One line of a dataset composition template (data/manifests/*.tsv).
struct CompositionRow {
  std::string dataset_id;
  std::string generator_id;
  Label label = Label::kFake;
  std::string category;
  int64_t count = 0;
  std::string resolution;
  std::string source;
};

// Tab-separated columns in CompositionRow order; '#' lines and blank lines
// are skipped. Throws kParseError / kInvariantViolation with source:line.
std::vector<CompositionRow> parse_composition(std::istream& in, const std::string& source);
std::vector<CompositionRow> load_composition(const std::filesystem::path& path);

int64_t fake_count(const std::vector<CompositionRow>& rows);
int64_t real_count(const std::vector<CompositionRow>& rows);
// Fake generator ids in first-seen order.
std::vector<std::string> composition_generators(const std::vector<CompositionRow>& rows);

// Placeholder manifest rows, one per counted image, with paths
// <dataset>/<generator>/<category>/<index>.png.
std::vector<ManifestEntry> expand_composition(const std::vector<CompositionRow>& rows,
                                              Split split);

}  // namespace fusiondetect::datasets

#endif  // FUSIONDETECT_COMPOSITION_H_
