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

// Pipeline orchestration and the parallel per-object worker pool.

#ifndef POLYSCOPE_ENGINE_HPP
#define POLYSCOPE_ENGINE_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "polyscope/analysis.hpp"
#include "polyscope/expansion.hpp"
#include "polyscope/labeling.hpp"
#include "polyscope/snapshot.hpp"

namespace polyscope {

enum class ScopeFilter : std::uint8_t { All, ExternalOnly };

// Dynamic hands out objects one at a time from a shared counter. StaticBlocks
// splits the object list into worker_count contiguous ranges up front; it
// exists for comparison benchmarks only.
enum class Schedule : std::uint8_t { Dynamic, StaticBlocks };

struct EngineConfig {
  std::size_t worker_count = 1;
  ExpansionConfig expansion;
  ScopeFilter scope_filter = ScopeFilter::All;
  Schedule schedule = Schedule::Dynamic;
};

struct Timing {
  double labeling_ms = 0;
  double expansion_ms = 0;
  double workers_ms = 0;
  double merge_ms = 0;

  bool operator==(const Timing&) const = default;
};

struct AnalysisResult {
  std::vector<IntegrityViolation> ivs;
  std::vector<AttackOperation> ops;
  std::vector<SquatPreventedRecord> squat_prevented;
  std::vector<Subject> subjects;
  std::vector<FsObject> objects;
  Timing timing;

  // Compares the three record sets only.
  bool same_records(const AnalysisResult& other) const;
};

// Throws InvalidSnapshotError when validation reports errors.
AnalysisResult analyze(const Snapshot& s, const EngineConfig& cfg);

using Record =
    std::variant<IntegrityViolation, AttackOperation, SquatPreventedRecord>;

// Returns false to abort the analysis.
using RecordSink = std::function<bool(const Record&)>;

struct StreamSummary {
  std::size_t iv_count = 0;
  std::size_t op_count = 0;
  std::size_t squat_prevented_count = 0;
  // False when the sink refused a record; the output is partial.
  bool complete = true;
};

// Same records as analyze(), handed to the sink object by object as workers
// finish them. Sink calls are serialized. Records are never accumulated.
StreamSummary analyze_streaming(const Snapshot& s, const EngineConfig& cfg,
                                const RecordSink& sink);

// Canonical record listing (labels, uids and paths instead of ids). Timing is
// included only when asked for.
std::string result_to_json(const AnalysisResult& r, bool include_timing);

}  // namespace polyscope

#endif  // POLYSCOPE_ENGINE_HPP
