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

// Snapshot data model: the complete, declarative description of a device's
// access-control state. Everything downstream is computed from a Snapshot.

#ifndef POLYSCOPE_SNAPSHOT_HPP
#define POLYSCOPE_SNAPSHOT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace polyscope {

inline constexpr std::string_view kSnapshotSchema = "polyscope-snapshot/1";

inline constexpr std::string_view kPermReadExternalStorage =
    "android.permission.READ_EXTERNAL_STORAGE";
inline constexpr std::string_view kPermWriteExternalStorage =
    "android.permission.WRITE_EXTERNAL_STORAGE";
inline constexpr std::string_view kPermManageExternalStorage =
    "android.permission.MANAGE_EXTERNAL_STORAGE";

using Uid = std::uint32_t;
using Gid = std::uint32_t;

// T0 (isolated) is folded into T1 when a snapshot is loaded.
enum class PrivilegeLevel : std::uint8_t { T1 = 1, T2, T3, T4, T5 };

enum class EntryKind : std::uint8_t { File, Dir, Symlink };

enum class Visibility : std::uint8_t { Private, Shared, LegacyRoot };

enum class TeClass : std::uint8_t { File, Dir, LnkFile };

// Bitmask over the TE permissions the engine understands.
namespace te_perm {
inline constexpr std::uint8_t kRead = 1u << 0;
inline constexpr std::uint8_t kWrite = 1u << 1;
inline constexpr std::uint8_t kExecute = 1u << 2;
inline constexpr std::uint8_t kOpen = 1u << 3;
inline constexpr std::uint8_t kSearch = 1u << 4;
inline constexpr std::uint8_t kAddName = 1u << 5;
inline constexpr std::uint8_t kRemoveName = 1u << 6;
}  // namespace te_perm

// Consent access bits.
namespace consent_access {
inline constexpr std::uint8_t kRead = 1u << 0;
inline constexpr std::uint8_t kWrite = 1u << 1;
}  // namespace consent_access

struct SnapshotMeta {
  std::string schema{kSnapshotSchema};
  std::string device;
  std::string android_version;
  bool scoped_storage_enabled = false;

  bool operator==(const SnapshotMeta&) const = default;
};

struct MountInfo {
  std::string path_prefix;
  bool writable = true;
  bool symlinks_allowed = true;
  bool external_storage = false;

  bool operator==(const MountInfo&) const = default;
};

struct ScopedMeta {
  std::optional<std::string> owner_package;
  Visibility visibility = Visibility::Shared;

  bool operator==(const ScopedMeta&) const = default;
};

struct FsEntry {
  std::string path;
  EntryKind kind = EntryKind::File;
  Uid dac_uid = 0;
  Gid dac_gid = 0;
  std::uint16_t mode = 0;  // 12 bits: suid/sgid/sticky + rwxrwxrwx
  std::string selinux_type;
  std::set<std::uint32_t> mls_categories;
  std::optional<ScopedMeta> scoped;

  bool operator==(const FsEntry&) const = default;
};

struct TeRule {
  std::string source_type;
  std::string target_type;
  TeClass cls = TeClass::File;
  std::uint8_t perms = 0;

  bool operator==(const TeRule&) const = default;
};

struct MacPolicy {
  std::vector<TeRule> te_rules;

  bool operator==(const MacPolicy&) const = default;
};

struct SubjectDecl {
  std::string mac_label;
  std::set<std::uint32_t> mls_categories;
  Uid uid = 0;
  Gid gid = 0;
  std::set<Gid> supplementary_groups;
  std::set<std::string> packages;
  std::optional<PrivilegeLevel> privilege_level;
  bool accepts_external_pathnames = false;
  bool uses_file_provider = false;

  bool operator==(const SubjectDecl&) const = default;
};

struct PackageDecl {
  std::string name;
  Uid uid = 0;
  std::set<std::string> declared_permissions;
  bool legacy_storage = false;
  bool uses_file_provider = false;

  bool operator==(const PackageDecl&) const = default;
};

// Literal label, or a glob whose only wildcard is a trailing '*'.
struct PrivilegeMapping {
  std::string pattern;
  PrivilegeLevel level = PrivilegeLevel::T1;

  bool operator==(const PrivilegeMapping&) const = default;
};

struct UserConsent {
  std::string package;
  std::string path;
  std::uint8_t access = 0;  // consent_access bits

  bool operator==(const UserConsent&) const = default;
};

struct Snapshot {
  SnapshotMeta meta;
  std::vector<MountInfo> mounts;
  std::vector<FsEntry> filesystem;
  MacPolicy mac_policy;
  std::vector<SubjectDecl> subjects;
  std::vector<PackageDecl> packages;
  std::map<std::string, std::set<Gid>> permission_group_map;
  std::vector<PrivilegeMapping> privilege_map;
  std::vector<UserConsent> user_consents;

  bool operator==(const Snapshot&) const = default;
};

// --- parsing / serialization (snapshot_json.cpp) ---------------------------

// Throws SyntaxError, SchemaError or ValueError.
Snapshot parse_snapshot(std::string_view raw);
Snapshot load_snapshot_file(const std::string& path);
// Canonical JSON text; parse_snapshot(serialize_snapshot(s)) == s.
std::string serialize_snapshot(const Snapshot& s);

// --- validation ------------------------------------------------------------

enum class Severity : std::uint8_t { Error, Warning };

struct Finding {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  std::string location;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool has_errors() const;
  std::size_t error_count() const;
  std::size_t warning_count() const;
};

ValidationReport validate_snapshot(const Snapshot& s);

// "ERROR CODE location: message"
std::string format_finding(const Finding& f);

// --- helpers ---------------------------------------------------------------

// Absolute, no empty / "." / ".." components, no trailing slash except "/".
bool is_normalized_path(std::string_view path);

// Component-aware prefix test: "/system" covers "/system/bin" but not
// "/systemx".
bool path_has_prefix(std::string_view path, std::string_view prefix);

// Longest-prefix mount. Throws NoMountError when nothing matches.
const MountInfo& mount_of(const Snapshot& s, std::string_view path);

std::string_view to_string(PrivilegeLevel level);
std::string_view to_string(EntryKind kind);
std::string_view to_string(Visibility visibility);
std::string_view to_string(TeClass cls);
std::string_view to_string(Severity severity);

// Accepts "T0".."T5"; T0 maps to T1.
std::optional<PrivilegeLevel> parse_privilege_level(std::string_view text);

// Storage permission the name denotes, if any.
bool is_storage_permission(std::string_view permission);

}  // namespace polyscope

#endif  // POLYSCOPE_SNAPSHOT_HPP
