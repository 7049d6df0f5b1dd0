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

// Triage tables, legacy attribution and the fully-enforced Scoped Storage
// what-if analysis.

#ifndef POLYSCOPE_REPORT_HPP
#define POLYSCOPE_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyscope/engine.hpp"
#include "polyscope/snapshot.hpp"

namespace polyscope {

inline constexpr std::string_view kReportSchema = "polyscope-report/1";
inline constexpr std::string_view kSyntheticMediaOwner = "system.media";

struct Metric {
  std::uint64_t total = 0;
  std::uint64_t external = 0;

  bool operator==(const Metric&) const = default;
};

struct AttributionRow {
  std::uint64_t victims = 0;
  std::uint64_t objects = 0;

  bool operator==(const AttributionRow&) const = default;
};

struct LegacyAttribution {
  std::uint64_t legacy_app_count = 0;
  std::uint64_t scoped_app_count = 0;
  AttributionRow legacy;     // IVs whose adversary is a legacy subject
  AttributionRow compliant;  // the rest

  bool operator==(const LegacyAttribution&) const = default;
};

struct WhatIfDelta {
  std::uint64_t ops_before = 0;
  std::uint64_t ops_after = 0;
  std::uint64_t adversaries_before = 0;
  std::uint64_t adversaries_after = 0;

  // round((before - after) / before * 100), half away from zero; empty when
  // before is zero.
  std::optional<std::int64_t> ops_reduction_pct() const;
  std::optional<std::int64_t> adversaries_reduction_pct() const;

  bool operator==(const WhatIfDelta&) const = default;
};

struct ReportRecord {
  std::string category;  // "iv", "op" or "squat_prevented"
  std::string kind;
  std::string victim_label;
  Uid victim_uid = 0;
  std::string adversary_label;
  Uid adversary_uid = 0;
  std::string object;

  bool operator==(const ReportRecord&) const = default;
};

struct TriageReport {
  std::string device;
  std::string android_version;
  bool scoped_storage_enabled = false;

  Metric ivs;
  Metric ops;

  Metric read_ivs;
  Metric write_ivs;
  Metric exec_ivs;
  Metric pathname_ivs;
  Metric binding_ivs;

  Metric file_mod_ops;
  Metric file_squat_ops;
  Metric link_traversal_ops;
  Metric luring_traversal_ops;
  Metric squat_prevented;

  Metric victims;
  Metric objects;
  Metric adversaries;

  std::optional<LegacyAttribution> legacy;
  std::optional<WhatIfDelta> what_if;
  std::optional<Timing> timing;

  std::vector<ReportRecord> records;

  bool operator==(const TriageReport&) const = default;
};

// IV metrics count distinct (victim, object) pairs; op metrics count distinct
// (kind, victim, object); "external" restricts to objects on external storage.
TriageReport summarize(const AnalysisResult& result, const Snapshot& s);

// Throws NotApplicableError when Scoped Storage is disabled.
LegacyAttribution legacy_attribution(const AnalysisResult& result,
                                     const Snapshot& s);

// Moves legacy-root entries into shared storage and strips legacy flags and
// WEX. Throws NotApplicableError when Scoped Storage is disabled.
Snapshot what_if_full_scoped(const Snapshot& s);

// External-storage ops and adversaries, before vs after.
WhatIfDelta what_if_delta(const AnalysisResult& before,
                          const AnalysisResult& after);

enum class ReportFormat : std::uint8_t { Json, Csv, Table };

std::string render(const TriageReport& report, ReportFormat format);
// Inverse of render(..., Json). Throws SyntaxError / SchemaError.
TriageReport report_from_json(std::string_view json);

// "1,021"
std::string format_count(std::uint64_t n);
// Integer percent, rounded half away from zero.
std::int64_t rounded_percent(std::int64_t part, std::int64_t whole);
// "1,021 (48%)"; the share is omitted when whole is zero.
std::string format_share(std::uint64_t part, std::uint64_t whole);
// "173(-28%)", or "173(—)" when before is zero.
std::string format_reduction(std::uint64_t after,
                             std::optional<std::int64_t> reduction_pct);

}  // namespace polyscope

#endif  // POLYSCOPE_REPORT_HPP
