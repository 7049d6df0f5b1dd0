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

#include "polyscope/report.hpp"

#include <algorithm>

#include "polyscope/authz.hpp"
#include "polyscope/errors.hpp"
#include "polyscope/expansion.hpp"

namespace polyscope {

namespace {

// Distinct-key counter with a parallel external-only count.
class DistinctCounter {
 public:
  void add(std::uint64_t key, bool external) {
    all_.push_back(key);
    if (external) ext_.push_back(key);
  }
  Metric metric() {
    return Metric{distinct(all_), distinct(ext_)};
  }

 private:
  static std::uint64_t distinct(std::vector<std::uint64_t>& v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::uint64_t>(
        std::unique(v.begin(), v.end()) - v.begin());
  }
  std::vector<std::uint64_t> all_;
  std::vector<std::uint64_t> ext_;
};

std::uint64_t pair_key(SubjectId v, ObjectId o) {
  return (static_cast<std::uint64_t>(v) << 32) | o;
}

std::uint64_t op_key(OpKind k, SubjectId v, ObjectId o) {
  return (static_cast<std::uint64_t>(k) << 60) |
         (static_cast<std::uint64_t>(v) << 32) | o;
}

bool is_external(const AnalysisResult& r, ObjectId o) {
  return r.objects[o].mount.external_storage;
}

struct OpMetrics {
  Metric ops;
  Metric adversaries;
};

OpMetrics op_metrics(const AnalysisResult& r) {
  DistinctCounter ops, adversaries;
  for (const auto& op : r.ops) {
    const bool ext = is_external(r, op.object);
    ops.add(op_key(op.kind, op.victim, op.object), ext);
    adversaries.add(op.adversary, ext);
  }
  return {ops.metric(), adversaries.metric()};
}

ReportRecord make_record(const AnalysisResult& r, std::string category,
                         std::string_view kind, SubjectId v, SubjectId a,
                         ObjectId o) {
  return ReportRecord{std::move(category),      std::string(kind),
                      r.subjects[v].mac_label,  r.subjects[v].uid,
                      r.subjects[a].mac_label,  r.subjects[a].uid,
                      r.objects[o].entry.path};
}

}  // namespace

std::optional<std::int64_t> WhatIfDelta::ops_reduction_pct() const {
  if (ops_before == 0) return std::nullopt;
  return rounded_percent(static_cast<std::int64_t>(ops_before) -
                             static_cast<std::int64_t>(ops_after),
                         static_cast<std::int64_t>(ops_before));
}

std::optional<std::int64_t> WhatIfDelta::adversaries_reduction_pct() const {
  if (adversaries_before == 0) return std::nullopt;
  return rounded_percent(static_cast<std::int64_t>(adversaries_before) -
                             static_cast<std::int64_t>(adversaries_after),
                         static_cast<std::int64_t>(adversaries_before));
}

TriageReport summarize(const AnalysisResult& result, const Snapshot& s) {
  TriageReport rep;
  rep.device = s.meta.device;
  rep.android_version = s.meta.android_version;
  rep.scoped_storage_enabled = s.meta.scoped_storage_enabled;

  DistinctCounter all_ivs, victims, objects;
  DistinctCounter by_kind[5];
  for (const auto& iv : result.ivs) {
    const bool ext = is_external(result, iv.object);
    const auto key = pair_key(iv.victim, iv.object);
    all_ivs.add(key, ext);
    by_kind[static_cast<int>(iv.kind)].add(key, ext);
    victims.add(iv.victim, ext);
    objects.add(iv.object, ext);
  }
  rep.ivs = all_ivs.metric();
  rep.read_ivs = by_kind[static_cast<int>(IvKind::Read)].metric();
  rep.write_ivs = by_kind[static_cast<int>(IvKind::Write)].metric();
  rep.exec_ivs = by_kind[static_cast<int>(IvKind::Exec)].metric();
  rep.binding_ivs = by_kind[static_cast<int>(IvKind::Binding)].metric();
  rep.pathname_ivs = by_kind[static_cast<int>(IvKind::Pathname)].metric();
  rep.victims = victims.metric();
  rep.objects = objects.metric();

  DistinctCounter ops_by_kind[4];
  for (const auto& op : result.ops) {
    ops_by_kind[static_cast<int>(op.kind)].add(
        pair_key(op.victim, op.object), is_external(result, op.object));
  }
  const auto om = op_metrics(result);
  rep.ops = om.ops;
  rep.adversaries = om.adversaries;
  rep.file_mod_ops = ops_by_kind[static_cast<int>(OpKind::FileMod)].metric();
  rep.file_squat_ops = ops_by_kind[static_cast<int>(OpKind::FileSquat)].metric();
  rep.link_traversal_ops =
      ops_by_kind[static_cast<int>(OpKind::LinkTraversal)].metric();
  rep.luring_traversal_ops =
      ops_by_kind[static_cast<int>(OpKind::LuringTraversal)].metric();

  DistinctCounter prevented;
  for (const auto& sp : result.squat_prevented) {
    prevented.add(pair_key(sp.victim, sp.object),
                  is_external(result, sp.object));
  }
  rep.squat_prevented = prevented.metric();

  if (s.meta.scoped_storage_enabled) {
    rep.legacy = legacy_attribution(result, s);
  }
  rep.timing = result.timing;

  rep.records.reserve(result.ivs.size() + result.ops.size() +
                      result.squat_prevented.size());
  for (const auto& iv : result.ivs) {
    rep.records.push_back(make_record(result, "iv", to_string(iv.kind),
                                      iv.victim, iv.adversary, iv.object));
  }
  for (const auto& op : result.ops) {
    rep.records.push_back(make_record(result, "op", to_string(op.kind),
                                      op.victim, op.adversary, op.object));
  }
  for (const auto& sp : result.squat_prevented) {
    rep.records.push_back(make_record(result, "squat_prevented", "file_squat",
                                      sp.victim, sp.adversary, sp.object));
  }
  return rep;
}

LegacyAttribution legacy_attribution(const AnalysisResult& result,
                                     const Snapshot& s) {
  if (!s.meta.scoped_storage_enabled) {
    throw NotApplicableError(
        "legacy attribution requires Scoped Storage to be enabled");
  }
  LegacyAttribution out;
  for (const auto& p : s.packages) {
    (p.legacy_storage ? out.legacy_app_count : out.scoped_app_count) += 1;
  }
  std::vector<std::uint64_t> victims[2], objects[2];
  for (const auto& iv : result.ivs) {
    const int side = result.subjects[iv.adversary].legacy ? 0 : 1;
    victims[side].push_back(iv.victim);
    objects[side].push_back(iv.object);
  }
  auto distinct = [](std::vector<std::uint64_t>& v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::uint64_t>(std::unique(v.begin(), v.end()) -
                                      v.begin());
  };
  out.legacy = {distinct(victims[0]), distinct(objects[0])};
  out.compliant = {distinct(victims[1]), distinct(objects[1])};
  return out;
}

Snapshot what_if_full_scoped(const Snapshot& s) {
  if (!s.meta.scoped_storage_enabled) {
    throw NotApplicableError(
        "the full Scoped Storage what-if requires Scoped Storage to be enabled");
  }
  Snapshot out = s;
  for (auto& p : out.packages) {
    p.legacy_storage = false;
    p.declared_permissions.erase(std::string(kPermWriteExternalStorage));
  }

  // New owners are chosen among the subjects that can still write the entry
  // once legacy access is gone: the lowest uid wins, then the lowest id.
  const auto subjects = build_subjects(out);
  const auto objects = build_objects(out, subjects);
  const PolicyIndex index(out, subjects, objects);
  const ExpansionConfig cfg;
  std::vector<AccessContext> contexts;
  contexts.reserve(subjects.size());
  for (const auto& subj : subjects) {
    contexts.push_back(expand_adversary(subj, out, cfg));
  }

  for (std::size_t i = 0; i < out.filesystem.size(); ++i) {
    auto& entry = out.filesystem[i];
    if (!entry.scoped || entry.scoped->visibility != Visibility::LegacyRoot) {
      continue;
    }
    const auto& obj = objects[i];
    const Access write = obj.is_binding ? Access::WriteBinding : Access::Write;
    const Subject* owner = nullptr;
    for (const auto& subj : subjects) {
      if (subj.packages.empty()) continue;
      if (!authorize(subj, contexts[subj.id], obj, write, index)) continue;
      if (owner == nullptr || subj.uid < owner->uid) owner = &subj;
    }
    entry.scoped->visibility = Visibility::Shared;
    entry.scoped->owner_package = owner != nullptr
                                      ? owner->packages.front()
                                      : std::string(kSyntheticMediaOwner);
  }
  return out;
}

WhatIfDelta what_if_delta(const AnalysisResult& before,
                          const AnalysisResult& after) {
  const auto b = op_metrics(before);
  const auto a = op_metrics(after);
  return WhatIfDelta{b.ops.external, a.ops.external, b.adversaries.external,
                     a.adversaries.external};
}

}  // namespace polyscope
