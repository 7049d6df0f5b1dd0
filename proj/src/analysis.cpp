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

#include "polyscope/analysis.hpp"

#include <algorithm>
#include <optional>

namespace polyscope {

std::string_view to_string(IvKind kind) {
  switch (kind) {
    case IvKind::Read: return "read";
    case IvKind::Write: return "write";
    case IvKind::Exec: return "exec";
    case IvKind::Binding: return "binding";
    case IvKind::Pathname: return "pathname";
  }
  return "read";
}

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::FileMod: return "file_mod";
    case OpKind::FileSquat: return "file_squat";
    case OpKind::LinkTraversal: return "link_traversal";
    case OpKind::LuringTraversal: return "luring_traversal";
  }
  return "file_mod";
}

AnalysisContext::AnalysisContext(const Snapshot& s,
                                 std::span<const Subject> subjects,
                                 std::span<const FsObject> objects,
                                 const ExpansionConfig& cfg)
    : snapshot_(&s),
      subjects_(subjects),
      objects_(objects),
      config_(cfg),
      index_(s, subjects, objects) {
  contexts_.reserve(subjects.size());
  for (const auto& subj : subjects) {
    contexts_.push_back(expand_adversary(subj, s, cfg));
  }
}

namespace {

bool can_victimize(const Subject& victim, const Subject& adversary) {
  return victim.privilege_mapped &&
         adversary.privilege_level < victim.privilege_level;
}

std::vector<char> membership(std::size_t n, const std::vector<SubjectId>& ids) {
  std::vector<char> in(n, 0);
  for (auto id : ids) in[id] = 1;
  return in;
}

std::vector<IntegrityViolation> file_ivs(const FsObject& obj,
                                         const AnalysisContext& ctx,
                                         const AccessSets& sets) {
  std::vector<IntegrityViolation> out;
  if (sets.writers.empty()) return out;
  const auto subjects = ctx.subjects();
  const auto n = subjects.size();
  const auto r = membership(n, sets.readers);
  const auto w = membership(n, sets.writers);
  const auto x = membership(n, sets.executors);

  for (SubjectId v = 0; v < n; ++v) {
    if (!r[v] && !w[v] && !x[v]) continue;
    for (SubjectId a : sets.writers) {
      if (!can_victimize(subjects[v], subjects[a])) continue;
      if (r[v]) out.push_back({obj.id, v, a, IvKind::Read});
      if (w[v]) out.push_back({obj.id, v, a, IvKind::Write});
      if (x[v]) out.push_back({obj.id, v, a, IvKind::Exec});
    }
  }
  return out;
}

std::vector<IntegrityViolation> binding_ivs(const FsObject& obj,
                                            const AnalysisContext& ctx,
                                            const AccessSets& sets) {
  std::vector<IntegrityViolation> out;
  const auto subjects = ctx.subjects();
  for (SubjectId v : sets.binding_users) {
    for (SubjectId a : sets.binding_writers) {
      if (can_victimize(subjects[v], subjects[a])) {
        out.push_back({obj.id, v, a, IvKind::Binding});
      }
    }
  }
  return out;
}

std::vector<IntegrityViolation> pathname_ivs(const FsObject& obj,
                                             const AnalysisContext& ctx,
                                             const AccessSets& sets) {
  std::vector<IntegrityViolation> out;
  if (sets.binding_writers.empty()) return out;
  const auto subjects = ctx.subjects();
  const auto users = membership(subjects.size(), sets.binding_users);
  const bool scoped = ctx.snapshot().meta.scoped_storage_enabled;

  for (const auto& victim : subjects) {
    if (!victim.accepts_external_pathnames || !victim.privilege_mapped) continue;
    // Victim expansion only relaxes DAC and adds storage permissions, so a
    // victim that can already use the binding can use it when expanded. For
    // the rest the expanded result depends on the adversary only through
    // whether it owns the binding.
    std::optional<bool> via_owner;
    std::optional<bool> via_other;
    for (SubjectId a : sets.binding_writers) {
      const auto& adversary = subjects[a];
      if (!can_victimize(victim, adversary)) continue;
      bool usable = users[victim.id] != 0;
      if (!usable) {
        auto& cached =
            adversary.uid == obj.entry.dac_uid ? via_owner : via_other;
        if (!cached) {
          const auto expanded = expand_victim(ctx.context(victim.id), adversary,
                                              obj, scoped, ctx.config());
          cached = authorize(victim, expanded, obj, Access::UseBinding,
                             ctx.index());
        }
        usable = *cached;
      }
      if (usable) out.push_back({obj.id, victim.id, a, IvKind::Pathname});
    }
  }
  return out;
}

AccessSets sets_for(const FsObject& obj, const AnalysisContext& ctx) {
  return access_sets(obj, ctx.subjects(), ctx.contexts(), ctx.index());
}

}  // namespace

std::vector<IntegrityViolation> compute_file_ivs(const FsObject& obj,
                                                 const AnalysisContext& ctx) {
  if (obj.entry.kind != EntryKind::File) return {};
  auto out = file_ivs(obj, ctx, sets_for(obj, ctx));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IntegrityViolation> compute_binding_ivs(const FsObject& obj,
                                                    const AnalysisContext& ctx) {
  if (obj.entry.kind != EntryKind::Dir) return {};
  auto out = binding_ivs(obj, ctx, sets_for(obj, ctx));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IntegrityViolation> compute_pathname_ivs(
    const FsObject& obj, const AnalysisContext& ctx) {
  if (obj.entry.kind != EntryKind::Dir) return {};
  auto out = pathname_ivs(obj, ctx, sets_for(obj, ctx));
  std::sort(out.begin(), out.end());
  return out;
}

bool squat_read_gate(const Subject& victim, const AccessContext& victim_ctx,
                     const Subject& adversary, const FsObject& binding,
                     bool scoped_storage_enabled) {
  if (!scoped_applies(victim, binding, scoped_storage_enabled)) return true;
  const StoragePerms perms =
      victim.granted_storage_perms | victim_ctx.assumed_storage_perms;
  if (victim.legacy || perms.has(StoragePerms::kRex) ||
      perms.has(StoragePerms::kMes)) {
    return true;
  }
  // A file planted in a private directory belongs to the directory's package;
  // anywhere else it belongs to the package that created it.
  auto owns = [&](const std::string& pkg) {
    return std::binary_search(victim.packages.begin(), victim.packages.end(),
                              pkg);
  };
  const auto& meta = *binding.entry.scoped;
  if (meta.visibility == Visibility::Private) {
    return meta.owner_package && owns(*meta.owner_package);
  }
  return std::any_of(adversary.packages.begin(), adversary.packages.end(), owns);
}

AttackOps compute_attack_ops(std::span<const IntegrityViolation> ivs,
                             const FsObject& obj, const AnalysisContext& ctx) {
  AttackOps out;
  const bool writable = obj.mount.writable;
  const bool symlinks = obj.mount.symlinks_allowed;
  const bool scoped = ctx.snapshot().meta.scoped_storage_enabled;
  if (!writable) return out;

  const auto subjects = ctx.subjects();
  for (const auto& iv : ivs) {
    const auto& victim = subjects[iv.victim];
    const auto emit = [&](OpKind kind) {
      out.ops.push_back({iv.object, iv.victim, iv.adversary, kind, iv.kind});
    };
    switch (iv.kind) {
      case IvKind::Read:
      case IvKind::Write:
      case IvKind::Exec:
        emit(OpKind::FileMod);
        break;
      case IvKind::Binding:
        if (squat_read_gate(victim, ctx.context(iv.victim),
                            subjects[iv.adversary], obj, scoped)) {
          emit(OpKind::FileSquat);
        } else {
          out.squat_prevented.push_back({iv.object, iv.victim, iv.adversary});
        }
        if (symlinks) emit(OpKind::LinkTraversal);
        break;
      case IvKind::Pathname:
        if (symlinks && !victim.uses_file_provider) {
          emit(OpKind::LuringTraversal);
        }
        break;
    }
  }

  // One operation per (kind, victim, adversary, object), keeping the smallest
  // source IV kind.
  std::sort(out.ops.begin(), out.ops.end());
  out.ops.erase(std::unique(out.ops.begin(), out.ops.end(),
                            [](const AttackOperation& a,
                               const AttackOperation& b) {
                              return a.object == b.object &&
                                     a.victim == b.victim &&
                                     a.adversary == b.adversary &&
                                     a.kind == b.kind;
                            }),
                out.ops.end());
  std::sort(out.squat_prevented.begin(), out.squat_prevented.end());
  out.squat_prevented.erase(
      std::unique(out.squat_prevented.begin(), out.squat_prevented.end()),
      out.squat_prevented.end());
  return out;
}

ObjectFindings analyze_object(const FsObject& obj, const AnalysisContext& ctx) {
  ObjectFindings out;
  if (obj.entry.kind == EntryKind::Symlink) return out;

  const auto sets = sets_for(obj, ctx);
  if (obj.entry.kind == EntryKind::File) {
    out.ivs = file_ivs(obj, ctx, sets);
  } else {
    out.ivs = binding_ivs(obj, ctx, sets);
    auto paths = pathname_ivs(obj, ctx, sets);
    out.ivs.insert(out.ivs.end(), paths.begin(), paths.end());
  }
  std::sort(out.ivs.begin(), out.ivs.end());

  auto ops = compute_attack_ops(out.ivs, obj, ctx);
  out.ops = std::move(ops.ops);
  out.squat_prevented = std::move(ops.squat_prevented);
  return out;
}

}  // namespace polyscope
