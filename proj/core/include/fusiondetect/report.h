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

#ifndef FUSIONDETECT_REPORT_H_
#define FUSIONDETECT_REPORT_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fusiondetect/imaging.h"
#include "fusiondetect/metrics.h"

namespace fusiondetect::metrics {

// Resolved configuration as ordered key/value pairs.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// Fraction in [0,1] printed as a percentage with two decimals ("80.86").
std::string format_percent(double fraction);
// "a / b" cell; an absent value prints as "-".
std::string format_cell(std::optional<double> a, std::optional<double> b);

struct ReportTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column-aligned markdown.
  std::string to_markdown() const;
  // RFC 4180 quoting where needed.
  std::string to_csv() const;
};

enum class CellKind {
  kAccAp,       // "Acc / AP"
  kClassAcc,    // "rAcc / fAcc"
};

// Groups in ascending-mean order followed by STD and Mean footer rows.
ReportTable aggregate_table(const AggregateReport& report, const std::string& group_header,
                            CellKind kind = CellKind::kAccAp);

// Full-precision per-group numbers plus mean/std rows, as fractions.
ReportTable aggregate_raw_table(const AggregateReport& report, const std::string& group_header);

// One row per labelled run with its mean "Acc / AP"; used for depth sweeps
// and backbone ablations.
ReportTable comparison_table(const std::vector<std::pair<std::string, AggregateReport>>& runs,
                             const std::string& variant_header);

struct RobustnessColumn {
  imaging::PerturbSpec perturbation;
  AggregateReport report;
};

// Clean / JPEG QF 95, 75, 50 / blur sigma 1, 2, 3.
std::vector<imaging::PerturbSpec> default_robustness_grid();

// One row per group and a Mean row; one "Acc / AP" column per perturbation
// in grid order.
ReportTable robustness_table(const std::vector<RobustnessColumn>& columns,
                             const std::string& group_header);

// Markdown document: title, tables, then the configuration block.
std::string markdown_document(const std::string& title,
                              const std::vector<std::pair<std::string, ReportTable>>& sections,
                              const ConfigEntries& config);

// JSON round trip for eval results, so reports can be re-rendered later.
std::string aggregate_to_json(const AggregateReport& report, const std::string& group_by,
                              const ConfigEntries& config);
struct StoredAggregate {
  AggregateReport report;
  std::string group_by;
  ConfigEntries config;
};
StoredAggregate aggregate_from_json(const std::string& text);

}  // namespace fusiondetect::metrics

#endif  // FUSIONDETECT_REPORT_H_
