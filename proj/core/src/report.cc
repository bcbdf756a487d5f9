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

#include "fusiondetect/report.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "fusiondetect/error.h"
#include "json.hpp"

namespace fusiondetect::metrics {
namespace {

using nlohmann::json;

size_t display_width(const std::string& s) {
  size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

std::string pad(const std::string& s, size_t width) {
  return s + std::string(width - std::min(width, display_width(s)), ' ');
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string raw(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", *v);
  return buf;
}

std::optional<double> std_of(const std::vector<double>& v) {
  return v.empty() ? std::nullopt : sample_std(v);
}

std::optional<double> mean_of(const std::vector<double>& v) {
  return v.empty() ? std::nullopt : std::optional<double>(mean(v));
}

json optional_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

std::string format_cell(std::optional<double> a, std::optional<double> b) {
  return (a ? format_percent(*a) : "-") + " / " + (b ? format_percent(*b) : "-");
}

std::string ReportTable::to_markdown() const {
  std::vector<size_t> widths(header.size(), 3);
  for (size_t c = 0; c < header.size(); ++c) widths[c] = std::max(widths[c], display_width(header[c]));
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size() && c < widths.size(); ++c) {
      widths[c] = std::max(widths[c], display_width(row[c]));
    }
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& cells) {
    os << "|";
    for (size_t c = 0; c < widths.size(); ++c) {
      os << " " << pad(c < cells.size() ? cells[c] : "", widths[c]) << " |";
    }
    os << "\n";
  };
  emit(header);
  os << "|";
  for (size_t c = 0; c < widths.size(); ++c) {
    const std::string dashes(widths[c] - 1, '-');
    os << " " << (c == 0 ? ":" + dashes : dashes + ":") << " |";
  }
  os << "\n";
  for (const auto& row : rows) emit(row);
  return os.str();
}

std::string ReportTable::to_csv() const {
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (size_t c = 0; c < cells.size(); ++c) os << (c ? "," : "") << csv_field(cells[c]);
    os << "\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return os.str();
}

ReportTable aggregate_table(const AggregateReport& report, const std::string& group_header,
                            CellKind kind) {
  ReportTable table;
  table.header = {group_header, kind == CellKind::kAccAp ? "Acc / AP (%)" : "rAcc / fAcc (%)"};
  std::vector<double> reals, fakes;
  for (const auto& id : report.rows_by_ascending_mean()) {
    const MetricsReport& r = report.groups.at(id);
    if (kind == CellKind::kAccAp) {
      table.rows.push_back({id, format_cell(r.accuracy, r.average_precision)});
    } else {
      table.rows.push_back({id, format_cell(r.real_accuracy, r.fake_accuracy)});
      if (r.real_accuracy) reals.push_back(*r.real_accuracy);
      if (r.fake_accuracy) fakes.push_back(*r.fake_accuracy);
    }
  }
  if (kind == CellKind::kAccAp) {
    table.rows.push_back({"STD", format_cell(report.std_accuracy, report.std_ap)});
    table.rows.push_back({"Mean", format_cell(report.mean_accuracy, report.mean_ap)});
  } else {
    table.rows.push_back({"STD", format_cell(std_of(reals), std_of(fakes))});
    table.rows.push_back({"Mean", format_cell(mean_of(reals), mean_of(fakes))});
  }
  return table;
}

ReportTable aggregate_raw_table(const AggregateReport& report, const std::string& group_header) {
  ReportTable table;
  table.header = {group_header, "n", "n_real", "n_fake", "accuracy", "average_precision",
                  "real_accuracy", "fake_accuracy"};
  for (const auto& id : report.rows_by_ascending_mean()) {
    const MetricsReport& r = report.groups.at(id);
    table.rows.push_back({id, std::to_string(r.n), std::to_string(r.n_real),
                          std::to_string(r.n_fake), raw(r.accuracy), raw(r.average_precision),
                          raw(r.real_accuracy), raw(r.fake_accuracy)});
  }
  table.rows.push_back({"std", "", "", "", raw(report.std_accuracy), raw(report.std_ap), "", ""});
  table.rows.push_back({"mean", "", "", "", raw(report.mean_accuracy), raw(report.mean_ap), "", ""});
  return table;
}

ReportTable comparison_table(const std::vector<std::pair<std::string, AggregateReport>>& runs,
                             const std::string& variant_header) {
  ReportTable table;
  table.header = {variant_header, "Acc / AP (%)", "STD"};
  for (const auto& [name, report] : runs) {
    table.rows.push_back({name, format_cell(report.mean_accuracy, report.mean_ap),
                          format_cell(report.std_accuracy, report.std_ap)});
  }
  return table;
}

std::vector<imaging::PerturbSpec> default_robustness_grid() {
  using imaging::PerturbSpec;
  return {PerturbSpec::identity(), PerturbSpec::jpeg(95), PerturbSpec::jpeg(75),
          PerturbSpec::jpeg(50),   PerturbSpec::blur(1.0), PerturbSpec::blur(2.0),
          PerturbSpec::blur(3.0)};
}

ReportTable robustness_table(const std::vector<RobustnessColumn>& columns,
                             const std::string& group_header) {
  if (columns.empty()) fail(ErrorCode::kEmptyInput, "robustness table: no columns");
  ReportTable table;
  table.header.push_back(group_header);
  for (const auto& col : columns) table.header.push_back(col.perturbation.label());
  for (const auto& [id, _] : columns.front().report.groups) {
    std::vector<std::string> row{id};
    for (const auto& col : columns) {
      const auto it = col.report.groups.find(id);
      row.push_back(it == col.report.groups.end()
                        ? format_cell(std::nullopt, std::nullopt)
                        : format_cell(it->second.accuracy, it->second.average_precision));
    }
    table.rows.push_back(std::move(row));
  }
  std::vector<std::string> mean_row{"Mean"};
  for (const auto& col : columns) {
    mean_row.push_back(format_cell(col.report.mean_accuracy, col.report.mean_ap));
  }
  table.rows.push_back(std::move(mean_row));
  return table;
}

std::string markdown_document(const std::string& title,
                              const std::vector<std::pair<std::string, ReportTable>>& sections,
                              const ConfigEntries& config) {
  std::ostringstream os;
  os << "# " << title << "\n";
  for (const auto& [heading, table] : sections) {
    os << "\n## " << heading << "\n\n" << table.to_markdown();
  }
  os << "\n## Configuration\n\n```\n";
  for (const auto& [key, value] : config) os << key << " = " << value << "\n";
  os << "```\n";
  return os.str();
}

std::string aggregate_to_json(const AggregateReport& report, const std::string& group_by,
                              const ConfigEntries& config) {
  json groups = json::object();
  for (const auto& [id, r] : report.groups) {
    groups[id] = {{"n", r.n},
                  {"n_real", r.n_real},
                  {"n_fake", r.n_fake},
                  {"accuracy", r.accuracy},
                  {"average_precision", optional_json(r.average_precision)},
                  {"real_accuracy", optional_json(r.real_accuracy)},
                  {"fake_accuracy", optional_json(r.fake_accuracy)}};
  }
  json cfg = json::array();
  for (const auto& [key, value] : config) cfg.push_back({key, value});
  json doc = {{"group_by", group_by},
              {"groups", groups},
              {"mean_accuracy", report.mean_accuracy},
              {"mean_ap", optional_json(report.mean_ap)},
              {"std_accuracy", optional_json(report.std_accuracy)},
              {"std_ap", optional_json(report.std_ap)},
              {"config", cfg}};
  return doc.dump(2) + "\n";
}

StoredAggregate aggregate_from_json(const std::string& text) {
  StoredAggregate out;
  try {
    const json doc = json::parse(text);
    out.group_by = doc.at("group_by").get<std::string>();
    std::map<std::string, MetricsReport> groups;
    for (const auto& [id, g] : doc.at("groups").items()) {
      MetricsReport r;
      r.n = g.at("n").get<size_t>();
      r.n_real = g.at("n_real").get<size_t>();
      r.n_fake = g.at("n_fake").get<size_t>();
      r.accuracy = g.at("accuracy").get<double>();
      r.average_precision = optional_from(g, "average_precision");
      r.real_accuracy = optional_from(g, "real_accuracy");
      r.fake_accuracy = optional_from(g, "fake_accuracy");
      groups[id] = r;
    }
    out.report = aggregate(groups);
    if (const auto it = doc.find("config"); it != doc.end()) {
      for (const auto& kv : *it) {
        out.config.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("metrics json: ") + e.what());
  }
  return out;
}

}  // namespace fusiondetect::metrics
