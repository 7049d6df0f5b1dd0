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

#include "polyscope/authz.hpp"

#include <algorithm>

namespace polyscope {

namespace {

std::uint64_t te_key(std::uint32_t source, std::uint32_t target, TeClass cls) {
  return (static_cast<std::uint64_t>(source) << 34) |
         (static_cast<std::uint64_t>(target) << 2) |
         static_cast<std::uint64_t>(cls);
}

// rwx bits the DAC check needs, in "other" position.
unsigned required_dac_bits(Access a) {
  switch (a) {
    case Access::Read: return 04;
    case Access::Write: return 02;
    case Access::Exec: return 01;
    case Access::UseBinding: return 01;
    case Access::WriteBinding: return 03;
  }
  return 07;
}

}  // namespace

bool is_read_like(Access a) {
  return a == Access::Read || a == Access::Exec || a == Access::UseBinding;
}

bool access_compatible(Access a, EntryKind kind) {
  const bool binding = a == Access::UseBinding || a == Access::WriteBinding;
  return binding == (kind == EntryKind::Dir);
}

TeClass te_class_of(EntryKind kind) {
  switch (kind) {
    case EntryKind::File: return TeClass::File;
    case EntryKind::Dir: return TeClass::Dir;
    case EntryKind::Symlink: return TeClass::LnkFile;
  }
  return TeClass::File;
}

std::uint8_t required_te_perms(Access a) {
  switch (a) {
    case Access::Read: return te_perm::kRead;
    case Access::Write: return te_perm::kWrite;
    case Access::Exec: return te_perm::kExecute;
    case Access::UseBinding: return te_perm::kSearch;
    case Access::WriteBinding: return te_perm::kWrite | te_perm::kAddName;
  }
  return 0xff;
}

TeIndex::TeIndex(const MacPolicy& policy) {
  auto intern = [this](const std::string& name) {
    auto [it, inserted] =
        names_.emplace(name, static_cast<std::uint32_t>(names_.size()));
    return it->second;
  };
  for (const auto& r : policy.te_rules) {
    const auto src = intern(r.source_type);
    const auto tgt = intern(r.target_type);
    table_[te_key(src, tgt, r.cls)] |= r.perms;
  }
}

std::uint32_t TeIndex::id_of(std::string_view name) const {
  auto it = names_.find(std::string(name));
  return it == names_.end() ? kUnknown : it->second;
}

std::uint8_t TeIndex::perms(std::uint32_t source, std::uint32_t target,
                            TeClass cls) const {
  if (source == kUnknown || target == kUnknown) return 0;
  auto it = table_.find(te_key(source, target, cls));
  return it == table_.end() ? 0 : it->second;
}

std::uint8_t TeIndex::perms(std::string_view source, std::string_view target,
                            TeClass cls) const {
  return perms(id_of(source), id_of(target), cls);
}

PolicyIndex::PolicyIndex(const Snapshot& s, std::span<const Subject> subjects,
                         std::span<const FsObject> objects)
    : te_(s.mac_policy), scoped_enabled_(s.meta.scoped_storage_enabled) {
  label_ids_.reserve(subjects.size());
  for (const auto& subj : subjects) label_ids_.push_back(te_.id_of(subj.mac_label));
  type_ids_.reserve(objects.size());
  for (const auto& obj : objects) {
    type_ids_.push_back(te_.id_of(obj.entry.selinux_type));
  }
  for (const auto& c : s.user_consents) {
    if (c.access & consent_access::kWrite) write_consents_.push_back(c);
  }
}

bool PolicyIndex::write_consent_covers(const Subject& subj,
                                       std::string_view path) const {
  return std::any_of(
      write_consents_.begin(), write_consents_.end(), [&](const UserConsent& c) {
        return path_has_prefix(path, c.path) &&
               std::binary_search(subj.packages.begin(), subj.packages.end(),
                                  c.package);
      });
}

bool mac_allows(const MacPolicy& policy, std::string_view subj_label,
                const FsObject& obj, Access a) {
  const TeClass cls = te_class_of(obj.entry.kind);
  std::uint8_t granted = 0;
  for (const auto& r : policy.te_rules) {
    if (r.source_type == subj_label && r.target_type == obj.entry.selinux_type &&
        r.cls == cls) {
      granted |= r.perms;
    }
  }
  const auto need = required_te_perms(a);
  return (granted & need) == need;
}

bool mac_allows(const PolicyIndex& index, const Subject& subj,
                const FsObject& obj, Access a) {
  const auto granted = index.te().perms(index.label_id(subj.id),
                                        index.type_id(obj.id),
                                        te_class_of(obj.entry.kind));
  const auto need = required_te_perms(a);
  return (granted & need) == need;
}

bool mls_allows(std::span<const std::uint32_t> subj_cats,
                std::span<const std::uint32_t> obj_cats) {
  return std::includes(subj_cats.begin(), subj_cats.end(), obj_cats.begin(),
                       obj_cats.end());
}

bool dac_allows(const Subject& subj, const AccessContext& ctx,
                const FsObject& obj, Access a) {
  if (subj.uid == 0) return true;
  unsigned mode = obj.entry.mode;
  if (ctx.dac_override_owner && *ctx.dac_override_owner == obj.entry.dac_uid) {
    mode = 0777;
  }
  unsigned triad;
  if (subj.uid == obj.entry.dac_uid) {
    triad = (mode >> 6) & 07;
  } else if (subj.gid == obj.entry.dac_gid ||
             std::binary_search(ctx.effective_groups.begin(),
                                ctx.effective_groups.end(), obj.entry.dac_gid)) {
    triad = (mode >> 3) & 07;
  } else {
    triad = mode & 07;
  }
  const unsigned need = required_dac_bits(a);
  return (triad & need) == need;
}

bool scoped_applies(const Subject& subj, const FsObject& obj,
                    bool scoped_enabled) {
  return scoped_enabled && obj.mount.external_storage &&
         obj.entry.scoped.has_value() && !subj.packages.empty();
}

bool scoped_allows(const Subject& subj, const AccessContext& ctx,
                   const FsObject& obj, Access a, const PolicyIndex& index) {
  if (!scoped_applies(subj, obj, index.scoped_storage_enabled())) return true;

  const StoragePerms perms = subj.granted_storage_perms | ctx.assumed_storage_perms;
  const bool mes = perms.has(StoragePerms::kMes);
  const auto& meta = *obj.entry.scoped;
  const bool owner =
      meta.owner_package &&
      std::binary_search(subj.packages.begin(), subj.packages.end(),
                         *meta.owner_package);

  switch (meta.visibility) {
    case Visibility::Private:
      return owner || mes;
    case Visibility::Shared:
      if (is_read_like(a)) {
        return owner || perms.has(StoragePerms::kRex) || mes || subj.legacy;
      }
      return owner || mes || subj.legacy ||
             index.write_consent_covers(subj, obj.entry.path);
    case Visibility::LegacyRoot:
      return subj.legacy || mes;
  }
  return false;
}

bool authorize(const Subject& subj, const AccessContext& ctx,
               const FsObject& obj, Access a, const PolicyIndex& index) {
  if (!access_compatible(a, obj.entry.kind)) return false;
  return mac_allows(index, subj, obj, a) &&
         std::includes(subj.mls_categories.begin(), subj.mls_categories.end(),
                       obj.entry.mls_categories.begin(),
                       obj.entry.mls_categories.end()) &&
         dac_allows(subj, ctx, obj, a) &&
         scoped_allows(subj, ctx, obj, a, index);
}

AccessSets access_sets(const FsObject& obj, std::span<const Subject> subjects,
                       std::span<const AccessContext> contexts,
                       const PolicyIndex& index) {
  AccessSets out;
  const bool dir = obj.entry.kind == EntryKind::Dir;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const auto& subj = subjects[i];
    const auto& ctx = contexts[i];
    if (dir) {
      if (authorize(subj, ctx, obj, Access::UseBinding, index)) {
        out.binding_users.push_back(subj.id);
      }
      if (authorize(subj, ctx, obj, Access::WriteBinding, index)) {
        out.binding_writers.push_back(subj.id);
      }
    } else {
      if (authorize(subj, ctx, obj, Access::Read, index)) {
        out.readers.push_back(subj.id);
      }
      if (authorize(subj, ctx, obj, Access::Write, index)) {
        out.writers.push_back(subj.id);
      }
      if (authorize(subj, ctx, obj, Access::Exec, index)) {
        out.executors.push_back(subj.id);
      }
    }
  }
  return out;
}

}  // namespace polyscope
