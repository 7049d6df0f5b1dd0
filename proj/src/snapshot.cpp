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

#include "polyscope/snapshot.hpp"

#include <algorithm>
#include <unordered_set>

#include "polyscope/errors.hpp"
#include "polyscope/labeling.hpp"

namespace polyscope {

bool ValidationReport::has_errors() const { return error_count() > 0; }

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
        return f.severity == Severity::Error;
      }));
}

std::size_t ValidationReport::warning_count() const {
  return findings.size() - error_count();
}

bool is_normalized_path(std::string_view path) {
  if (path.empty() || path.front() != '/') return false;
  if (path == "/") return true;
  if (path.back() == '/') return false;
  std::size_t pos = 1;
  while (pos <= path.size()) {
    std::size_t next = path.find('/', pos);
    if (next == std::string_view::npos) next = path.size();
    std::string_view comp = path.substr(pos, next - pos);
    if (comp.empty() || comp == "." || comp == "..") return false;
    pos = next + 1;
  }
  return true;
}

bool path_has_prefix(std::string_view path, std::string_view prefix) {
  if (prefix == "/") return !path.empty() && path.front() == '/';
  if (!path.starts_with(prefix)) return false;
  return path.size() == prefix.size() || path[prefix.size()] == '/';
}

const MountInfo& mount_of(const Snapshot& s, std::string_view path) {
  const MountInfo* best = nullptr;
  for (const auto& m : s.mounts) {
    if (!path_has_prefix(path, m.path_prefix)) continue;
    if (best == nullptr || m.path_prefix.size() > best->path_prefix.size()) {
      best = &m;
    }
  }
  if (best == nullptr) {
    throw NoMountError("no mount covers " + std::string(path));
  }
  return *best;
}

std::string_view to_string(PrivilegeLevel level) {
  switch (level) {
    case PrivilegeLevel::T1: return "T1";
    case PrivilegeLevel::T2: return "T2";
    case PrivilegeLevel::T3: return "T3";
    case PrivilegeLevel::T4: return "T4";
    case PrivilegeLevel::T5: return "T5";
  }
  return "T1";
}

std::string_view to_string(EntryKind kind) {
  switch (kind) {
    case EntryKind::File: return "file";
    case EntryKind::Dir: return "dir";
    case EntryKind::Symlink: return "symlink";
  }
  return "file";
}

std::string_view to_string(Visibility visibility) {
  switch (visibility) {
    case Visibility::Private: return "private";
    case Visibility::Shared: return "shared";
    case Visibility::LegacyRoot: return "legacy_root";
  }
  return "shared";
}

std::string_view to_string(TeClass cls) {
  switch (cls) {
    case TeClass::File: return "file";
    case TeClass::Dir: return "dir";
    case TeClass::LnkFile: return "lnk_file";
  }
  return "file";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::Error ? "ERROR" : "WARNING";
}

std::optional<PrivilegeLevel> parse_privilege_level(std::string_view text) {
  if (text == "T0" || text == "T1") return PrivilegeLevel::T1;
  if (text == "T2") return PrivilegeLevel::T2;
  if (text == "T3") return PrivilegeLevel::T3;
  if (text == "T4") return PrivilegeLevel::T4;
  if (text == "T5") return PrivilegeLevel::T5;
  return std::nullopt;
}

bool is_storage_permission(std::string_view permission) {
  return permission == kPermReadExternalStorage ||
         permission == kPermWriteExternalStorage ||
         permission == kPermManageExternalStorage;
}

std::string format_finding(const Finding& f) {
  std::string out(to_string(f.severity));
  out += ' ';
  out += f.code;
  out += ' ';
  out += f.location;
  out += ": ";
  out += f.message;
  return out;
}

namespace {

class FindingSink {
 public:
  void error(std::string code, std::string location, std::string message) {
    add(Severity::Error, std::move(code), std::move(location),
        std::move(message));
  }
  void warning(std::string code, std::string location, std::string message) {
    add(Severity::Warning, std::move(code), std::move(location),
        std::move(message));
  }
  ValidationReport take() { return std::move(report_); }

 private:
  void add(Severity sev, std::string code, std::string location,
           std::string message) {
    report_.findings.push_back(
        Finding{sev, std::move(code), std::move(message), std::move(location)});
  }
  ValidationReport report_;
};

std::string indexed(std::string_view list, std::size_t i) {
  return std::string(list) + "[" + std::to_string(i) + "]";
}

void validate_mounts(const Snapshot& s, FindingSink& out) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < s.mounts.size(); ++i) {
    const auto& m = s.mounts[i];
    if (!is_normalized_path(m.path_prefix)) {
      out.error("MOUNT_PATH_INVALID", indexed("mounts", i),
                "mount prefix '" + m.path_prefix +
                    "' is not an absolute normalized path");
    }
    if (!seen.insert(m.path_prefix).second) {
      out.error("DUPLICATE_MOUNT", indexed("mounts", i),
                "mount prefix '" + m.path_prefix + "' declared twice");
    }
  }
}

void validate_filesystem(const Snapshot& s, FindingSink& out) {
  std::unordered_set<std::string> seen;
  for (const auto& e : s.filesystem) {
    const std::string& loc = e.path;
    if (!is_normalized_path(e.path)) {
      out.error("PATH_NOT_NORMALIZED", loc,
                "path must be absolute without '.', '..' or empty components");
      continue;
    }
    if (!seen.insert(e.path).second) {
      out.error("DUPLICATE_PATH", loc, "path appears more than once");
    }
    if (e.mode > 07777) {
      out.error("MODE_OUT_OF_RANGE", loc, "mode exceeds 07777");
    }
    const MountInfo* mount = nullptr;
    try {
      mount = &mount_of(s, e.path);
    } catch (const NoMountError&) {
      out.error("NO_MOUNT", loc, "no mount prefix covers this path");
    }
    if (e.scoped) {
      if (mount != nullptr && !mount->external_storage) {
        out.error("SCOPED_OUTSIDE_EXTERNAL", loc,
                  "scoped metadata on an entry outside external storage");
      }
      const bool needs_owner = e.scoped->visibility != Visibility::LegacyRoot;
      if (needs_owner && !e.scoped->owner_package) {
        out.error("SCOPED_OWNER_MISSING", loc,
                  std::string(to_string(e.scoped->visibility)) +
                      " entry requires owner_package");
      }
      if (!needs_owner && e.scoped->owner_package) {
        out.error("SCOPED_OWNER_UNEXPECTED", loc,
                  "legacy_root entry must not carry owner_package");
      }
    } else if (mount != nullptr && mount->external_storage &&
               s.meta.scoped_storage_enabled &&
               e.kind != EntryKind::Symlink) {
      out.warning("SCOPED_META_MISSING", loc,
                  "external entry without scoped metadata is not governed by "
                  "Scoped Storage");
    }
  }
}

void validate_policy(const Snapshot& s, FindingSink& out) {
  for (std::size_t i = 0; i < s.mac_policy.te_rules.size(); ++i) {
    if (s.mac_policy.te_rules[i].perms == 0) {
      out.error("EMPTY_PERMS", indexed("mac_policy.te_rules", i),
                "rule grants no permissions");
    }
  }
  for (std::size_t i = 0; i < s.privilege_map.size(); ++i) {
    const auto& p = s.privilege_map[i].pattern;
    const auto star = p.find('*');
    if (p.empty() || (star != std::string::npos && star != p.size() - 1)) {
      out.error("INVALID_PATTERN", indexed("privilege_map", i),
                "pattern '" + p + "' may only use a trailing '*'");
    }
  }
}

void validate_subjects(const Snapshot& s, FindingSink& out) {
  std::unordered_set<std::string> packages;
  for (std::size_t i = 0; i < s.packages.size(); ++i) {
    if (!packages.insert(s.packages[i].name).second) {
      out.error("DUPLICATE_PACKAGE", indexed("packages", i),
                "package '" + s.packages[i].name + "' declared twice");
    }
  }
  std::unordered_set<std::string> sources;
  for (const auto& r : s.mac_policy.te_rules) sources.insert(r.source_type);

  const auto& pmap =
      s.privilege_map.empty() ? default_privilege_map() : s.privilege_map;
  const auto levels = assign_privilege_levels(s.subjects, pmap);

  for (std::size_t i = 0; i < s.subjects.size(); ++i) {
    const auto& d = s.subjects[i];
    const std::string loc = indexed("subjects", i);
    for (const auto& p : d.packages) {
      if (!packages.contains(p)) {
        out.error("UNKNOWN_PACKAGE", loc,
                  "subject references undeclared package '" + p + "'");
      }
    }
    if (!sources.contains(d.mac_label)) {
      out.warning("DANGLING_LABEL", loc,
                  "label '" + d.mac_label + "' is the source of no TE rule");
    }
    if (!levels[i].mapped) {
      out.warning("UNMAPPED_PRIVILEGE", loc,
                  "label '" + d.mac_label +
                      "' matches no privilege pattern; treated as a T1 "
                      "adversary and never as a victim");
    }
  }

  for (std::size_t i = 0; i < s.user_consents.size(); ++i) {
    const auto& c = s.user_consents[i];
    const std::string loc = indexed("user_consents", i);
    if (!packages.contains(c.package)) {
      out.error("CONSENT_UNKNOWN_PACKAGE", loc,
                "consent for undeclared package '" + c.package + "'");
    }
    if (!is_normalized_path(c.path)) {
      out.error("CONSENT_PATH_INVALID", loc,
                "consent path '" + c.path + "' is not normalized");
    }
  }
}

}  // namespace

ValidationReport validate_snapshot(const Snapshot& s) {
  FindingSink out;
  if (s.meta.schema != kSnapshotSchema) {
    out.error("SCHEMA_VERSION", "meta.schema",
              "expected '" + std::string(kSnapshotSchema) + "', got '" +
                  s.meta.schema + "'");
  }
  validate_mounts(s, out);
  validate_filesystem(s, out);
  validate_policy(s, out);
  validate_subjects(s, out);
  return out.take();
}

}  // namespace polyscope
