// Copyright 2026 The PolyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cinttypes>
#include <cstdio>
#include <utility>

#include "json.hpp"
#include "polyscope/errors.hpp"
#include "polyscope/report.hpp"

namespace polyscope {

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr std::size_t kTableWidth = 120;

// One data line of the table (and one CSV row).
struct Row {
  std::string section;
  std::string metric;
  std::string first;
  std::string second;
};

struct Section {
  std::string name;
  std::string first_heading;
  std::string second_heading;
  std::vector<Row> rows;
};

std::string format_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

void metric_row(Section& sec, std::string name, const Metric& m) {
  sec.rows.push_back({sec.name, std::move(name), format_count(m.total),
                      format_share(m.external, m.total)});
}

std::vector<Section> sections_of(const TriageReport& r) {
  std::vector<Section> out;

  Section summary{"summary", "total", "external", {}};
  metric_row(summary, "ivs", r.ivs);
  metric_row(summary, "ops", r.ops);
  metric_row(summary, "victims", r.victims);
  metric_row(summary, "objects", r.objects);
  metric_row(summary, "adversaries", r.adversaries);
  out.push_back(std::move(summary));

  Section ivs{"iv_kinds", "total", "external", {}};
  metric_row(ivs, "read", r.read_ivs);
  metric_row(ivs, "write", r.write_ivs);
  metric_row(ivs, "exec", r.exec_ivs);
  metric_row(ivs, "binding", r.binding_ivs);
  metric_row(ivs, "pathname", r.pathname_ivs);
  out.push_back(std::move(ivs));

  Section ops{"op_kinds", "total", "external", {}};
  metric_row(ops, "file_mod", r.file_mod_ops);
  metric_row(ops, "file_squat", r.file_squat_ops);
  metric_row(ops, "link_traversal", r.link_traversal_ops);
  metric_row(ops, "luring_traversal", r.luring_traversal_ops);
  metric_row(ops, "squat_prevented", r.squat_prevented);
  out.push_back(std::move(ops));

  if (r.legacy) {
    const auto& l = *r.legacy;
    Section sec{"legacy", "victims", "objects", {}};
    sec.rows.push_back({sec.name, "legacy_adversaries",
                        format_count(l.legacy.victims),
                        format_count(l.legacy.objects)});
    sec.rows.push_back({sec.name, "compliant_adversaries",
                        format_count(l.compliant.victims),
                        format_count(l.compliant.objects)});
    out.push_back(std::move(sec));

    const auto total = l.legacy_app_count + l.scoped_app_count;
    Section apps{"apps", "count", "", {}};
    apps.rows.push_back(
        {apps.name, "legacy", format_share(l.legacy_app_count, total), ""});
    apps.rows.push_back(
        {apps.name, "compliant", format_share(l.scoped_app_count, total), ""});
    out.push_back(std::move(apps));
  }

  if (r.what_if) {
    const auto& w = *r.what_if;
    Section sec{"what_if_full_scoped", "before", "after", {}};
    sec.rows.push_back({sec.name, "external_ops", format_count(w.ops_before),
                        format_reduction(w.ops_after, w.ops_reduction_pct())});
    sec.rows.push_back(
        {sec.name, "external_adversaries", format_count(w.adversaries_before),
         format_reduction(w.adversaries_after,
                          w.adversaries_reduction_pct())});
    out.push_back(std::move(sec));
  }

  if (r.timing) {
    const auto& t = *r.timing;
    Section sec{"timing", "ms", "", {}};
    sec.rows.push_back({sec.name, "labeling", format_ms(t.labeling_ms), ""});
    sec.rows.push_back({sec.name, "expansion", format_ms(t.expansion_ms), ""});
    sec.rows.push_back({sec.name, "workers", format_ms(t.workers_ms), ""});
    sec.rows.push_back({sec.name, "merge", format_ms(t.merge_ms), ""});
    out.push_back(std::move(sec));
  }
  return out;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// Right-aligns by display width; "—" is three bytes but one column.
std::string pad_left(const std::string& s, std::size_t width) {
  std::size_t cols = 0;
  for (unsigned char c : s) {
    if ((c & 0xc0) != 0x80) ++cols;
  }
  return cols < width ? std::string(width - cols, ' ') + s : s;
}

std::string render_table(const TriageReport& r) {
  constexpr std::size_t kMetric = 40;
  constexpr std::size_t kValue = 40;
  std::string out;
  auto line = [&](std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out += s;
    out += '\n';
  };

  line("PolyScope triage report");
  line("device: " + r.device + "    android: " + r.android_version +
       "    scoped storage: " +
       (r.scoped_storage_enabled ? "enabled" : "disabled"));
  line(std::string(kTableWidth, '='));
  for (const auto& sec : sections_of(r)) {
    line(pad_right(sec.name, kMetric) + pad_left(sec.first_heading, kValue) +
         pad_left(sec.second_heading, kValue));
    line(std::string(kTableWidth, '-'));
    for (const auto& row : sec.rows) {
      line(pad_right("  " + row.metric, kMetric) + pad_left(row.first, kValue) +
           pad_left(row.second, kValue));
    }
    line("");
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_csv(const TriageReport& r) {
  std::string out = "section,metric,first,second\r\n";
  for (const auto& sec : sections_of(r)) {
    for (const auto& row : sec.rows) {
      out += csv_field(row.section) + ',' + csv_field(row.metric) + ',' +
             csv_field(row.first) + ',' + csv_field(row.second) + "\r\n";
    }
  }
  return out;
}

ojson metric_json(const Metric& m) {
  return {{"total", m.total}, {"external", m.external}};
}

std::string render_json(const TriageReport& r) {
  ojson doc;
  doc["schema"] = kReportSchema;
  doc["device"] = r.device;
  doc["android_version"] = r.android_version;
  doc["scoped_storage_enabled"] = r.scoped_storage_enabled;

  ojson m;
  m["ivs"] = metric_json(r.ivs);
  m["ops"] = metric_json(r.ops);
  m["read_ivs"] = metric_json(r.read_ivs);
  m["write_ivs"] = metric_json(r.write_ivs);
  m["exec_ivs"] = metric_json(r.exec_ivs);
  m["pathname_ivs"] = metric_json(r.pathname_ivs);
  m["binding_ivs"] = metric_json(r.binding_ivs);
  m["file_mod_ops"] = metric_json(r.file_mod_ops);
  m["file_squat_ops"] = metric_json(r.file_squat_ops);
  m["link_traversal_ops"] = metric_json(r.link_traversal_ops);
  m["luring_traversal_ops"] = metric_json(r.luring_traversal_ops);
  m["squat_prevented"] = metric_json(r.squat_prevented);
  m["victims"] = metric_json(r.victims);
  m["objects"] = metric_json(r.objects);
  m["adversaries"] = metric_json(r.adversaries);
  doc["metrics"] = std::move(m);

  if (r.legacy) {
    const auto& l = *r.legacy;
    doc["legacy"] = {
        {"legacy_app_count", l.legacy_app_count},
        {"scoped_app_count", l.scoped_app_count},
        {"legacy", {{"victims", l.legacy.victims}, {"objects", l.legacy.objects}}},
        {"compliant",
         {{"victims", l.compliant.victims}, {"objects", l.compliant.objects}}}};
  } else {
    doc["legacy"] = nullptr;
  }

  if (r.what_if) {
    const auto& w = *r.what_if;
    auto pct = [](std::optional<std::int64_t> p) {
      return p ? ojson(*p) : ojson(nullptr);
    };
    doc["what_if"] = {{"ops_before", w.ops_before},
                      {"ops_after", w.ops_after},
                      {"ops_reduction_pct", pct(w.ops_reduction_pct())},
                      {"adversaries_before", w.adversaries_before},
                      {"adversaries_after", w.adversaries_after},
                      {"adversaries_reduction_pct",
                       pct(w.adversaries_reduction_pct())}};
  } else {
    doc["what_if"] = nullptr;
  }

  if (r.timing) {
    doc["timing_ms"] = {{"labeling", r.timing->labeling_ms},
                        {"expansion", r.timing->expansion_ms},
                        {"workers", r.timing->workers_ms},
                        {"merge", r.timing->merge_ms}};
  } else {
    doc["timing_ms"] = nullptr;
  }

  doc["records"] = ojson::array();
  for (const auto& rec : r.records) {
    doc["records"].push_back(
        {{"category", rec.category},
         {"kind", rec.kind},
         {"object", rec.object},
         {"victim", {{"label", rec.victim_label}, {"uid", rec.victim_uid}}},
         {"adversary",
          {{"label", rec.adversary_label}, {"uid", rec.adversary_uid}}}});
  }
  return doc.dump(2) + "\n";
}

// Field access that reports the JSON path on failure.
template <class T>
T field(const json& obj, const std::string& key, const std::string& path) {
  const std::string where = path + "/" + key;
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError(where, "missing field");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(where, "wrong type");
  }
}

const json& member(const json& obj, const std::string& key,
                   const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError(path + "/" + key, "missing field");
  }
  return obj.at(key);
}

Metric metric_from(const json& metrics, const std::string& key) {
  const std::string path = "/metrics/" + key;
  const json& m = member(metrics, key, "/metrics");
  return Metric{field<std::uint64_t>(m, "total", path),
                field<std::uint64_t>(m, "external", path)};
}

}  // namespace

std::string format_count(std::uint64_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::int64_t rounded_percent(std::int64_t part, std::int64_t whole) {
  if (whole == 0) return 0;
  if (whole < 0) {
    part = -part;
    whole = -whole;
  }
  const std::int64_t mag = part < 0 ? -part : part;
  const std::int64_t rounded = (200 * mag + whole) / (2 * whole);
  return part < 0 ? -rounded : rounded;
}

std::string format_share(std::uint64_t part, std::uint64_t whole) {
  std::string out = format_count(part);
  if (whole == 0) return out;
  const auto pct = rounded_percent(static_cast<std::int64_t>(part),
                                   static_cast<std::int64_t>(whole));
  return out + " (" + std::to_string(pct) + "%)";
}

std::string format_reduction(std::uint64_t after,
                             std::optional<std::int64_t> reduction_pct) {
  std::string out = format_count(after);
  if (!reduction_pct) return out + "(—)";
  const std::int64_t change = -*reduction_pct;
  std::string sign = change > 0 ? "+" : "";
  return out + "(" + sign + std::to_string(change) + "%)";
}

std::string render(const TriageReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Table: return render_table(report);
  }
  return render_json(report);
}

TriageReport report_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw SyntaxError("malformed report document", line, column);
  }
  if (!doc.is_object()) throw SchemaError("/", "expected an object");
  const auto schema = field<std::string>(doc, "schema", "");
  if (schema != kReportSchema) {
    throw SchemaError("/schema", "unsupported report schema '" + schema + "'");
  }

  TriageReport r;
  r.device = field<std::string>(doc, "device", "");
  r.android_version = field<std::string>(doc, "android_version", "");
  r.scoped_storage_enabled = field<bool>(doc, "scoped_storage_enabled", "");

  const json& m = member(doc, "metrics", "");
  r.ivs = metric_from(m, "ivs");
  r.ops = metric_from(m, "ops");
  r.read_ivs = metric_from(m, "read_ivs");
  r.write_ivs = metric_from(m, "write_ivs");
  r.exec_ivs = metric_from(m, "exec_ivs");
  r.pathname_ivs = metric_from(m, "pathname_ivs");
  r.binding_ivs = metric_from(m, "binding_ivs");
  r.file_mod_ops = metric_from(m, "file_mod_ops");
  r.file_squat_ops = metric_from(m, "file_squat_ops");
  r.link_traversal_ops = metric_from(m, "link_traversal_ops");
  r.luring_traversal_ops = metric_from(m, "luring_traversal_ops");
  r.squat_prevented = metric_from(m, "squat_prevented");
  r.victims = metric_from(m, "victims");
  r.objects = metric_from(m, "objects");
  r.adversaries = metric_from(m, "adversaries");

  const json& legacy = member(doc, "legacy", "");
  if (!legacy.is_null()) {
    LegacyAttribution l;
    l.legacy_app_count = field<std::uint64_t>(legacy, "legacy_app_count", "/legacy");
    l.scoped_app_count = field<std::uint64_t>(legacy, "scoped_app_count", "/legacy");
    const json& lg = member(legacy, "legacy", "/legacy");
    l.legacy = {field<std::uint64_t>(lg, "victims", "/legacy/legacy"),
                field<std::uint64_t>(lg, "objects", "/legacy/legacy")};
    const json& cp = member(legacy, "compliant", "/legacy");
    l.compliant = {field<std::uint64_t>(cp, "victims", "/legacy/compliant"),
                   field<std::uint64_t>(cp, "objects", "/legacy/compliant")};
    r.legacy = l;
  }

  const json& what_if = member(doc, "what_if", "");
  if (!what_if.is_null()) {
    WhatIfDelta w;
    w.ops_before = field<std::uint64_t>(what_if, "ops_before", "/what_if");
    w.ops_after = field<std::uint64_t>(what_if, "ops_after", "/what_if");
    w.adversaries_before =
        field<std::uint64_t>(what_if, "adversaries_before", "/what_if");
    w.adversaries_after =
        field<std::uint64_t>(what_if, "adversaries_after", "/what_if");
    r.what_if = w;
  }

  const json& timing = member(doc, "timing_ms", "");
  if (!timing.is_null()) {
    Timing t;
    t.labeling_ms = field<double>(timing, "labeling", "/timing_ms");
    t.expansion_ms = field<double>(timing, "expansion", "/timing_ms");
    t.workers_ms = field<double>(timing, "workers", "/timing_ms");
    t.merge_ms = field<double>(timing, "merge", "/timing_ms");
    r.timing = t;
  }

  const json& records = member(doc, "records", "");
  if (!records.is_array()) throw SchemaError("/records", "expected an array");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string path = "/records/" + std::to_string(i);
    const json& rec = records[i];
    ReportRecord out;
    out.category = field<std::string>(rec, "category", path);
    out.kind = field<std::string>(rec, "kind", path);
    out.object = field<std::string>(rec, "object", path);
    const json& v = member(rec, "victim", path);
    out.victim_label = field<std::string>(v, "label", path + "/victim");
    out.victim_uid = field<Uid>(v, "uid", path + "/victim");
    const json& a = member(rec, "adversary", path);
    out.adversary_label = field<std::string>(a, "label", path + "/adversary");
    out.adversary_uid = field<Uid>(a, "uid", path + "/adversary");
    r.records.push_back(std::move(out));
  }
  return r;
}

}  // namespace polyscope
