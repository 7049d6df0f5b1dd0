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

#include "json.hpp"
#include "polyscope/engine.hpp"

namespace polyscope {

namespace {

using ojson = nlohmann::ordered_json;

ojson subject_ref(const AnalysisResult& r, SubjectId id) {
  const auto& s = r.subjects[id];
  return {{"label", s.mac_label}, {"uid", s.uid}};
}

}  // namespace

std::string result_to_json(const AnalysisResult& r, bool include_timing) {
  ojson doc;
  doc["schema"] = "polyscope-result/1";

  doc["subjects"] = ojson::array();
  for (const auto& s : r.subjects) {
    doc["subjects"].push_back({{"id", s.id},
                               {"label", s.mac_label},
                               {"uid", s.uid},
                               {"level", to_string(s.privilege_level)},
                               {"legacy", s.legacy}});
  }

  doc["ivs"] = ojson::array();
  for (const auto& iv : r.ivs) {
    doc["ivs"].push_back({{"kind", to_string(iv.kind)},
                          {"object", r.objects[iv.object].entry.path},
                          {"victim", subject_ref(r, iv.victim)},
                          {"adversary", subject_ref(r, iv.adversary)}});
  }

  doc["ops"] = ojson::array();
  for (const auto& op : r.ops) {
    doc["ops"].push_back({{"kind", to_string(op.kind)},
                          {"object", r.objects[op.object].entry.path},
                          {"victim", subject_ref(r, op.victim)},
                          {"adversary", subject_ref(r, op.adversary)},
                          {"source_iv", to_string(op.source_iv_kind)}});
  }

  doc["squat_prevented"] = ojson::array();
  for (const auto& sp : r.squat_prevented) {
    doc["squat_prevented"].push_back(
        {{"object", r.objects[sp.object].entry.path},
         {"victim", subject_ref(r, sp.victim)},
         {"adversary", subject_ref(r, sp.adversary)}});
  }

  if (include_timing) {
    doc["timing_ms"] = {{"labeling", r.timing.labeling_ms},
                        {"expansion", r.timing.expansion_ms},
                        {"workers", r.timing.workers_ms},
                        {"merge", r.timing.merge_ms}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace polyscope
