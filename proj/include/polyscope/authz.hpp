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

// Per-policy authorization (TE, MLS, DAC, Scoped Storage) and their
// restrictive composition.

#ifndef POLYSCOPE_AUTHZ_HPP
#define POLYSCOPE_AUTHZ_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polyscope/labeling.hpp"
#include "polyscope/snapshot.hpp"

namespace polyscope {

enum class Access : std::uint8_t { Read, Write, Exec, UseBinding, WriteBinding };

bool is_read_like(Access a);

// Read/Write/Exec apply to files and symlinks, the binding accesses to dirs.
bool access_compatible(Access a, EntryKind kind);

TeClass te_class_of(EntryKind kind);

// TE permissions an access needs (all of them, from a single label pair).
std::uint8_t required_te_perms(Access a);

struct AccessContext {
  std::vector<Gid> effective_groups;  // sorted, after expansion
  StoragePerms assumed_storage_perms;
  // Set by victim expansion: objects owned by this uid are evaluated as if
  // their mode were 0777.
  std::optional<Uid> dac_override_owner;

  bool dac_override_owned() const { return dac_override_owner.has_value(); }
  bool operator==(const AccessContext&) const = default;
};

// Interned view of the TE rules for fast (label, type, class) lookups.
class TeIndex {
 public:
  static constexpr std::uint32_t kUnknown = 0xffffffffu;

  explicit TeIndex(const MacPolicy& policy);

  std::uint32_t id_of(std::string_view name) const;
  std::uint8_t perms(std::uint32_t source, std::uint32_t target,
                     TeClass cls) const;
  std::uint8_t perms(std::string_view source, std::string_view target,
                     TeClass cls) const;

 private:
  std::unordered_map<std::string, std::uint32_t> names_;
  std::unordered_map<std::uint64_t, std::uint8_t> table_;
};

// Everything authorization needs beyond the subject, context and object.
class PolicyIndex {
 public:
  PolicyIndex(const Snapshot& s, std::span<const Subject> subjects,
              std::span<const FsObject> objects);

  const TeIndex& te() const { return te_; }
  std::uint32_t label_id(SubjectId s) const { return label_ids_[s]; }
  std::uint32_t type_id(ObjectId o) const { return type_ids_[o]; }
  bool scoped_storage_enabled() const { return scoped_enabled_; }
  // A write consent for one of the subject's packages covering the path.
  bool write_consent_covers(const Subject& subj, std::string_view path) const;

 private:
  TeIndex te_;
  std::vector<std::uint32_t> label_ids_;
  std::vector<std::uint32_t> type_ids_;
  bool scoped_enabled_ = false;
  std::vector<UserConsent> write_consents_;
};

bool mac_allows(const MacPolicy& policy, std::string_view subj_label,
                const FsObject& obj, Access a);
bool mac_allows(const PolicyIndex& index, const Subject& subj,
                const FsObject& obj, Access a);

// Category-subset dominance: obj ⊆ subj, for every access kind.
bool mls_allows(std::span<const std::uint32_t> subj_cats,
                std::span<const std::uint32_t> obj_cats);

bool dac_allows(const Subject& subj, const AccessContext& ctx,
                const FsObject& obj, Access a);

bool scoped_allows(const Subject& subj, const AccessContext& ctx,
                   const FsObject& obj, Access a, const PolicyIndex& index);

// True when Scoped Storage governs this (subject, object) pair at all. Off
// external storage, with the defense disabled, for objects without scoped
// metadata, and for package-less (native/system) subjects it does not.
bool scoped_applies(const Subject& subj, const FsObject& obj,
                    bool scoped_enabled);

// Restrictive composition of the four policies. False for incompatible
// (access, object kind) pairs.
bool authorize(const Subject& subj, const AccessContext& ctx,
               const FsObject& obj, Access a, const PolicyIndex& index);

struct AccessSets {
  std::vector<SubjectId> readers;
  std::vector<SubjectId> writers;
  std::vector<SubjectId> executors;
  std::vector<SubjectId> binding_users;
  std::vector<SubjectId> binding_writers;

  bool operator==(const AccessSets&) const = default;
};

// contexts[i] belongs to subjects[i].
AccessSets access_sets(const FsObject& obj, std::span<const Subject> subjects,
                       std::span<const AccessContext> contexts,
                       const PolicyIndex& index);

}  // namespace polyscope

#endif  // POLYSCOPE_AUTHZ_HPP
