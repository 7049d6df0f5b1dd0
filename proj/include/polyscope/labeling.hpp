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

// Composite subjects and filesystem objects built from a snapshot.

#ifndef POLYSCOPE_LABELING_HPP
#define POLYSCOPE_LABELING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polyscope/snapshot.hpp"

namespace polyscope {

using SubjectId = std::uint32_t;
using ObjectId = std::uint32_t;

// Scoped Storage permissions as a small bit set.
struct StoragePerms {
  static constexpr std::uint8_t kRex = 1u << 0;
  static constexpr std::uint8_t kWex = 1u << 1;
  static constexpr std::uint8_t kMes = 1u << 2;

  std::uint8_t bits = 0;

  bool has(std::uint8_t p) const { return (bits & p) != 0; }
  StoragePerms operator|(StoragePerms o) const {
    return StoragePerms{static_cast<std::uint8_t>(bits | o.bits)};
  }
  bool operator==(const StoragePerms&) const = default;
};

StoragePerms storage_perms_of(const std::set<std::string>& permissions);

struct Subject {
  SubjectId id = 0;
  std::string mac_label;
  std::vector<std::uint32_t> mls_categories;  // sorted
  Uid uid = 0;
  Gid gid = 0;
  std::vector<Gid> groups;             // {gid} ∪ supplementary, sorted
  std::vector<std::string> packages;   // sorted
  std::vector<std::string> declared_permissions;  // union over packages
  bool legacy = false;
  StoragePerms granted_storage_perms;
  PrivilegeLevel privilege_level = PrivilegeLevel::T1;
  // False when no explicit level and no privilege_map pattern matched. Such
  // subjects stay in the analysis as T1 adversaries but are never victims.
  bool privilege_mapped = true;
  bool accepts_external_pathnames = false;
  bool uses_file_provider = false;

  bool operator==(const Subject&) const = default;
};

struct FsObject {
  ObjectId id = 0;
  FsEntry entry;
  MountInfo mount;
  bool is_binding = false;
  std::vector<SubjectId> owner_subjects;

  bool operator==(const FsObject&) const = default;
};

struct LevelAssignment {
  PrivilegeLevel level = PrivilegeLevel::T1;
  bool mapped = true;
};

// Built-in map used when the snapshot carries an empty privilege_map.
const std::vector<PrivilegeMapping>& default_privilege_map();

bool privilege_pattern_matches(std::string_view pattern, std::string_view label);

// Explicit level wins, then the first matching pattern, then T1 (unmapped).
std::vector<LevelAssignment> assign_privilege_levels(
    std::span<const SubjectDecl> subjects,
    std::span<const PrivilegeMapping> privilege_map);

// One Subject per SubjectDecl, ordered by (mac_label, uid, declaration order);
// ids are the positions in that order.
std::vector<Subject> build_subjects(const Snapshot& s);

// One FsObject per FsEntry in snapshot order.
std::vector<FsObject> build_objects(const Snapshot& s,
                                    std::span<const Subject> subjects);

// Subjects strictly below the victim's level, by id. Empty for T1 victims and
// for victims whose level is unmapped.
std::vector<SubjectId> adversaries_of(const Subject& victim,
                                      std::span<const Subject> subjects);

}  // namespace polyscope

#endif  // POLYSCOPE_LABELING_HPP
