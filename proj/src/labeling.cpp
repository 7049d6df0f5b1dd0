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

#include "polyscope/labeling.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace polyscope {

StoragePerms storage_perms_of(const std::set<std::string>& permissions) {
  StoragePerms p;
  if (permissions.contains(std::string(kPermReadExternalStorage))) {
    p.bits |= StoragePerms::kRex;
  }
  if (permissions.contains(std::string(kPermWriteExternalStorage))) {
    p.bits |= StoragePerms::kWex;
  }
  if (permissions.contains(std::string(kPermManageExternalStorage))) {
    p.bits |= StoragePerms::kMes;
  }
  return p;
}

const std::vector<PrivilegeMapping>& default_privilege_map() {
  // Google's process privilege levels, with isolated processes (T0) already
  // folded into T1.
  static const std::vector<PrivilegeMapping> map = {
      {"kernel", PrivilegeLevel::T5},
      {"init", PrivilegeLevel::T5},
      {"system_server", PrivilegeLevel::T4},
      {"bluetooth", PrivilegeLevel::T3},
      {"mediaserver", PrivilegeLevel::T3},
      {"platform_app", PrivilegeLevel::T2},
      {"priv_app", PrivilegeLevel::T2},
      {"untrusted_app*", PrivilegeLevel::T1},
      {"isolated_app*", PrivilegeLevel::T1},
      {"webview*", PrivilegeLevel::T1},
  };
  return map;
}

bool privilege_pattern_matches(std::string_view pattern,
                               std::string_view label) {
  if (!pattern.empty() && pattern.back() == '*') {
    return label.starts_with(pattern.substr(0, pattern.size() - 1));
  }
  return pattern == label;
}

std::vector<LevelAssignment> assign_privilege_levels(
    std::span<const SubjectDecl> subjects,
    std::span<const PrivilegeMapping> privilege_map) {
  std::vector<LevelAssignment> out;
  out.reserve(subjects.size());
  for (const auto& d : subjects) {
    if (d.privilege_level) {
      out.push_back({*d.privilege_level, true});
      continue;
    }
    auto it = std::find_if(privilege_map.begin(), privilege_map.end(),
                           [&](const PrivilegeMapping& m) {
                             return privilege_pattern_matches(m.pattern,
                                                              d.mac_label);
                           });
    if (it != privilege_map.end()) {
      out.push_back({it->level, true});
    } else {
      out.push_back({PrivilegeLevel::T1, false});
    }
  }
  return out;
}

std::vector<Subject> build_subjects(const Snapshot& s) {
  const auto& pmap =
      s.privilege_map.empty() ? default_privilege_map() : s.privilege_map;
  const auto levels = assign_privilege_levels(s.subjects, pmap);

  std::unordered_map<std::string_view, const PackageDecl*> by_name;
  std::unordered_multimap<Uid, const PackageDecl*> by_uid;
  for (const auto& p : s.packages) {
    by_name.emplace(p.name, &p);
    by_uid.emplace(p.uid, &p);
  }

  std::vector<Subject> built;
  built.reserve(s.subjects.size());
  for (std::size_t i = 0; i < s.subjects.size(); ++i) {
    const auto& d = s.subjects[i];
    Subject subj;
    subj.mac_label = d.mac_label;
    subj.mls_categories.assign(d.mls_categories.begin(),
                               d.mls_categories.end());
    subj.uid = d.uid;
    subj.gid = d.gid;
    std::set<Gid> groups = d.supplementary_groups;
    groups.insert(d.gid);
    subj.groups.assign(groups.begin(), groups.end());

    // Several packages can share one uid; without an explicit list the
    // subject gets all of them.
    std::set<std::string> names = d.packages;
    if (names.empty()) {
      auto [lo, hi] = by_uid.equal_range(d.uid);
      for (auto it = lo; it != hi; ++it) names.insert(it->second->name);
    }

    std::set<std::string> declared;
    bool all_file_provider = true;
    for (const auto& name : names) {
      auto it = by_name.find(name);
      if (it == by_name.end()) continue;
      const PackageDecl& pkg = *it->second;
      subj.legacy = subj.legacy || pkg.legacy_storage;
      all_file_provider = all_file_provider && pkg.uses_file_provider;
      declared.insert(pkg.declared_permissions.begin(),
                      pkg.declared_permissions.end());
    }
    subj.packages.assign(names.begin(), names.end());
    subj.granted_storage_perms = storage_perms_of(declared);
    subj.declared_permissions.assign(declared.begin(), declared.end());
    subj.privilege_level = levels[i].level;
    subj.privilege_mapped = levels[i].mapped;
    subj.accepts_external_pathnames = d.accepts_external_pathnames;
    subj.uses_file_provider = d.uses_file_provider && all_file_provider;
    built.push_back(std::move(subj));
  }

  std::vector<std::size_t> order(built.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (built[a].mac_label != built[b].mac_label) {
                       return built[a].mac_label < built[b].mac_label;
                     }
                     return built[a].uid < built[b].uid;
                   });

  std::vector<Subject> out;
  out.reserve(built.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    out.push_back(std::move(built[order[pos]]));
    out.back().id = static_cast<SubjectId>(pos);
  }
  return out;
}

std::vector<FsObject> build_objects(const Snapshot& s,
                                    std::span<const Subject> subjects) {
  std::unordered_multimap<Uid, SubjectId> by_uid;
  for (const auto& subj : subjects) by_uid.emplace(subj.uid, subj.id);

  std::vector<FsObject> out;
  out.reserve(s.filesystem.size());
  for (std::size_t i = 0; i < s.filesystem.size(); ++i) {
    const auto& e = s.filesystem[i];
    FsObject obj;
    obj.id = static_cast<ObjectId>(i);
    obj.entry = e;
    obj.mount = mount_of(s, e.path);
    obj.is_binding = e.kind == EntryKind::Dir;
    auto [lo, hi] = by_uid.equal_range(e.dac_uid);
    for (auto it = lo; it != hi; ++it) obj.owner_subjects.push_back(it->second);
    std::sort(obj.owner_subjects.begin(), obj.owner_subjects.end());
    out.push_back(std::move(obj));
  }
  return out;
}

std::vector<SubjectId> adversaries_of(const Subject& victim,
                                      std::span<const Subject> subjects) {
  std::vector<SubjectId> out;
  if (!victim.privilege_mapped) return out;
  for (const auto& s : subjects) {
    if (s.privilege_level < victim.privilege_level) out.push_back(s.id);
  }
  return out;
}

}  // namespace polyscope
