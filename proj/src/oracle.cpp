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

#include "polyscope/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "polyscope/errors.hpp"

namespace polyscope {

namespace {

// Everything below is written straight from the rule texts. Nothing here
// calls into labeling, authz, expansion or analysis.

struct Level {
  std::string pattern;
  PrivilegeLevel level;
};

const std::vector<Level>& builtin_levels() {
  static const std::vector<Level> levels = {
      {"kernel", PrivilegeLevel::T5},       {"init", PrivilegeLevel::T5},
      {"system_server", PrivilegeLevel::T4}, {"bluetooth", PrivilegeLevel::T3},
      {"mediaserver", PrivilegeLevel::T3},  {"platform_app", PrivilegeLevel::T2},
      {"priv_app", PrivilegeLevel::T2},     {"untrusted_app*", PrivilegeLevel::T1},
      {"isolated_app*", PrivilegeLevel::T1}, {"webview*", PrivilegeLevel::T1},
  };
  return levels;
}

bool glob(const std::string& pattern, const std::string& label) {
  if (!pattern.empty() && pattern.back() == '*') {
    const std::string stem = pattern.substr(0, pattern.size() - 1);
    return label.compare(0, stem.size(), stem) == 0;
  }
  return pattern == label;
}

bool under(const std::string& path, const std::string& prefix) {
  if (prefix == "/") return !path.empty() && path[0] == '/';
  if (path.size() < prefix.size()) return false;
  if (path.compare(0, prefix.size(), prefix) != 0) return false;
  return path.size() == prefix.size() || path[prefix.size()] == '/';
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

struct Ctx {
  std::set<Gid> groups;
  bool rex = false;
  bool wex = false;
  bool mes = false;
  bool override_set = false;
  Uid override_uid = 0;
};

enum class Op { Read, Write, Exec, Search, AddEntry };

class Oracle {
 public:
  Oracle(const Snapshot& s, const EngineConfig& cfg) : s_(s), cfg_(cfg) {
    make_subjects();
    make_objects();
  }

  AnalysisResult run();

 private:
  void make_subjects();
  void make_objects();
  Ctx adversary_ctx(const Subject& subj) const;
  bool allowed(const Subject& subj, const Ctx& ctx, const FsObject& obj,
               Op op) const;
  bool te(const Subject& subj, const FsObject& obj, Op op) const;
  bool dac(const Subject& subj, const Ctx& ctx, const FsObject& obj,
           Op op) const;
  bool scoped(const Subject& subj, const Ctx& ctx, const FsObject& obj,
              Op op) const;
  bool squat_readable(const Subject& victim, const Ctx& ctx,
                      const Subject& adversary, const FsObject& dir) const;

  const Snapshot& s_;
  const EngineConfig& cfg_;
  std::vector<Subject> subjects_;
  std::vector<FsObject> objects_;
};

void Oracle::make_subjects() {
  struct Pending {
    Subject subj;
    std::size_t decl;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < s_.subjects.size(); ++i) {
    const SubjectDecl& d = s_.subjects[i];
    Subject x;
    x.mac_label = d.mac_label;
    for (auto c : d.mls_categories) x.mls_categories.push_back(c);
    x.uid = d.uid;
    x.gid = d.gid;
    std::set<Gid> groups(d.supplementary_groups.begin(),
                         d.supplementary_groups.end());
    groups.insert(d.gid);
    x.groups.assign(groups.begin(), groups.end());

    std::set<std::string> pkgs(d.packages.begin(), d.packages.end());
    if (pkgs.empty()) {
      for (const auto& p : s_.packages) {
        if (p.uid == d.uid) pkgs.insert(p.name);
      }
    }
    std::set<std::string> perms;
    bool fp_all = true;
    for (const auto& name : pkgs) {
      for (const auto& p : s_.packages) {
        if (p.name != name) continue;
        if (p.legacy_storage) x.legacy = true;
        if (!p.uses_file_provider) fp_all = false;
        perms.insert(p.declared_permissions.begin(),
                     p.declared_permissions.end());
      }
    }
    x.packages.assign(pkgs.begin(), pkgs.end());
    x.declared_permissions.assign(perms.begin(), perms.end());
    if (perms.count(std::string(kPermReadExternalStorage))) {
      x.granted_storage_perms.bits |= StoragePerms::kRex;
    }
    if (perms.count(std::string(kPermWriteExternalStorage))) {
      x.granted_storage_perms.bits |= StoragePerms::kWex;
    }
    if (perms.count(std::string(kPermManageExternalStorage))) {
      x.granted_storage_perms.bits |= StoragePerms::kMes;
    }

    if (d.privilege_level) {
      x.privilege_level = *d.privilege_level;
      x.privilege_mapped = true;
    } else {
      x.privilege_level = PrivilegeLevel::T1;
      x.privilege_mapped = false;
      if (s_.privilege_map.empty()) {
        for (const auto& l : builtin_levels()) {
          if (glob(l.pattern, d.mac_label)) {
            x.privilege_level = l.level;
            x.privilege_mapped = true;
            break;
          }
        }
      } else {
        for (const auto& m : s_.privilege_map) {
          if (glob(m.pattern, d.mac_label)) {
            x.privilege_level = m.level;
            x.privilege_mapped = true;
            break;
          }
        }
      }
    }
    x.accepts_external_pathnames = d.accepts_external_pathnames;
    x.uses_file_provider = d.uses_file_provider && fp_all;
    pending.push_back({std::move(x), i});
  }

  std::sort(pending.begin(), pending.end(),
            [](const Pending& a, const Pending& b) {
              return std::tie(a.subj.mac_label, a.subj.uid, a.decl) <
                     std::tie(b.subj.mac_label, b.subj.uid, b.decl);
            });
  for (std::size_t i = 0; i < pending.size(); ++i) {
    pending[i].subj.id = static_cast<SubjectId>(i);
    subjects_.push_back(std::move(pending[i].subj));
  }
}

void Oracle::make_objects() {
  for (std::size_t i = 0; i < s_.filesystem.size(); ++i) {
    FsObject o;
    o.id = static_cast<ObjectId>(i);
    o.entry = s_.filesystem[i];
    const MountInfo* best = nullptr;
    for (const auto& m : s_.mounts) {
      if (!under(o.entry.path, m.path_prefix)) continue;
      if (best == nullptr || m.path_prefix.size() > best->path_prefix.size()) {
        best = &m;
      }
    }
    if (best == nullptr) throw NoMountError("no mount for " + o.entry.path);
    o.mount = *best;
    o.is_binding = o.entry.kind == EntryKind::Dir;
    for (const auto& x : subjects_) {
      if (x.uid == o.entry.dac_uid) o.owner_subjects.push_back(x.id);
    }
    objects_.push_back(std::move(o));
  }
}

Ctx Oracle::adversary_ctx(const Subject& subj) const {
  Ctx c;
  c.groups.insert(subj.groups.begin(), subj.groups.end());
  if (!cfg_.expansion.adversary_expansion) return c;
  for (const auto& perm : subj.declared_permissions) {
    for (const auto& [name, gids] : s_.permission_group_map) {
      if (name == perm) c.groups.insert(gids.begin(), gids.end());
    }
    if (perm == kPermReadExternalStorage) c.rex = true;
    if (perm == kPermManageExternalStorage) c.mes = true;
    if (perm == kPermWriteExternalStorage && !s_.meta.scoped_storage_enabled) {
      c.wex = true;
    }
  }
  return c;
}

bool Oracle::te(const Subject& subj, const FsObject& obj, Op op) const {
  TeClass cls = TeClass::File;
  if (obj.entry.kind == EntryKind::Dir) cls = TeClass::Dir;
  if (obj.entry.kind == EntryKind::Symlink) cls = TeClass::LnkFile;
  std::uint8_t granted = 0;
  for (const auto& r : s_.mac_policy.te_rules) {
    if (r.source_type == subj.mac_label &&
        r.target_type == obj.entry.selinux_type && r.cls == cls) {
      granted |= r.perms;
    }
  }
  std::uint8_t need = 0;
  switch (op) {
    case Op::Read: need = te_perm::kRead; break;
    case Op::Write: need = te_perm::kWrite; break;
    case Op::Exec: need = te_perm::kExecute; break;
    case Op::Search: need = te_perm::kSearch; break;
    case Op::AddEntry: need = te_perm::kWrite | te_perm::kAddName; break;
  }
  return (granted & need) == need;
}

bool Oracle::dac(const Subject& subj, const Ctx& ctx, const FsObject& obj,
                 Op op) const {
  if (subj.uid == 0) return true;
  unsigned mode = obj.entry.mode & 0777;
  if (ctx.override_set && ctx.override_uid == obj.entry.dac_uid) mode = 0777;
  unsigned bits;
  if (subj.uid == obj.entry.dac_uid) {
    bits = mode >> 6;
  } else if (subj.gid == obj.entry.dac_gid || ctx.groups.count(obj.entry.dac_gid)) {
    bits = mode >> 3;
  } else {
    bits = mode;
  }
  bits &= 7;
  switch (op) {
    case Op::Read: return (bits & 4) != 0;
    case Op::Write: return (bits & 2) != 0;
    case Op::Exec: return (bits & 1) != 0;
    case Op::Search: return (bits & 1) != 0;
    case Op::AddEntry: return (bits & 3) == 3;
  }
  return false;
}

bool Oracle::scoped(const Subject& subj, const Ctx& ctx, const FsObject& obj,
                    Op op) const {
  if (!s_.meta.scoped_storage_enabled) return true;
  if (!obj.mount.external_storage) return true;
  if (!obj.entry.scoped) return true;
  if (subj.packages.empty()) return true;

  const bool rex = ctx.rex || subj.granted_storage_perms.has(StoragePerms::kRex);
  const bool mes = ctx.mes || subj.granted_storage_perms.has(StoragePerms::kMes);
  const ScopedMeta& meta = *obj.entry.scoped;
  const bool owner = meta.owner_package && has(subj.packages, *meta.owner_package);

  if (meta.visibility == Visibility::Private) return owner || mes;
  if (meta.visibility == Visibility::LegacyRoot) return subj.legacy || mes;

  const bool reading = op == Op::Read || op == Op::Exec || op == Op::Search;
  if (reading) return owner || rex || mes || subj.legacy;
  if (owner || mes || subj.legacy) return true;
  for (const auto& c : s_.user_consents) {
    if ((c.access & consent_access::kWrite) != 0 && has(subj.packages, c.package) &&
        under(obj.entry.path, c.path)) {
      return true;
    }
  }
  return false;
}

bool Oracle::allowed(const Subject& subj, const Ctx& ctx, const FsObject& obj,
                     Op op) const {
  const bool dir_op = op == Op::Search || op == Op::AddEntry;
  if (dir_op != (obj.entry.kind == EntryKind::Dir)) return false;
  for (auto c : obj.entry.mls_categories) {
    if (!std::binary_search(subj.mls_categories.begin(),
                            subj.mls_categories.end(), c)) {
      return false;
    }
  }
  return te(subj, obj, op) && dac(subj, ctx, obj, op) &&
         scoped(subj, ctx, obj, op);
}

bool Oracle::squat_readable(const Subject& victim, const Ctx& ctx,
                            const Subject& adversary,
                            const FsObject& dir) const {
  if (!s_.meta.scoped_storage_enabled || !dir.mount.external_storage ||
      !dir.entry.scoped || victim.packages.empty()) {
    return true;
  }
  if (victim.legacy) return true;
  if (ctx.rex || ctx.mes || victim.granted_storage_perms.has(StoragePerms::kRex) ||
      victim.granted_storage_perms.has(StoragePerms::kMes)) {
    return true;
  }
  const ScopedMeta& meta = *dir.entry.scoped;
  if (meta.visibility == Visibility::Private) {
    return meta.owner_package && has(victim.packages, *meta.owner_package);
  }
  for (const auto& p : adversary.packages) {
    if (has(victim.packages, p)) return true;
  }
  return false;
}

AnalysisResult Oracle::run() {
  AnalysisResult out;
  const bool scoped_on = s_.meta.scoped_storage_enabled;
  std::vector<Ctx> ctx;
  for (const auto& x : subjects_) ctx.push_back(adversary_ctx(x));

  std::set<IntegrityViolation> ivs;
  std::map<std::tuple<ObjectId, SubjectId, SubjectId, OpKind>, IvKind> ops;
  std::set<SquatPreventedRecord> prevented;
  auto add_op = [&](const IntegrityViolation& iv, OpKind k) {
    auto key = std::make_tuple(iv.object, iv.victim, iv.adversary, k);
    auto it = ops.find(key);
    if (it == ops.end() || iv.kind < it->second) ops[key] = iv.kind;
  };

  for (const auto& obj : objects_) {
    if (cfg_.scope_filter == ScopeFilter::ExternalOnly &&
        !obj.mount.external_storage) {
      continue;
    }
    if (obj.entry.kind == EntryKind::Symlink) continue;
    const bool dir = obj.entry.kind == EntryKind::Dir;

    for (const auto& v : subjects_) {
      if (!v.privilege_mapped) continue;
      for (const auto& a : subjects_) {
        if (!(a.privilege_level < v.privilege_level)) continue;
        std::vector<IntegrityViolation> found;
        if (!dir) {
          if (!allowed(a, ctx[a.id], obj, Op::Write)) continue;
          if (allowed(v, ctx[v.id], obj, Op::Read)) {
            found.push_back({obj.id, v.id, a.id, IvKind::Read});
          }
          if (allowed(v, ctx[v.id], obj, Op::Write)) {
            found.push_back({obj.id, v.id, a.id, IvKind::Write});
          }
          if (allowed(v, ctx[v.id], obj, Op::Exec)) {
            found.push_back({obj.id, v.id, a.id, IvKind::Exec});
          }
        } else {
          if (!allowed(a, ctx[a.id], obj, Op::AddEntry)) continue;
          if (allowed(v, ctx[v.id], obj, Op::Search)) {
            found.push_back({obj.id, v.id, a.id, IvKind::Binding});
          }
          if (v.accepts_external_pathnames) {
            Ctx lured = ctx[v.id];
            const bool expand = cfg_.expansion.victim_expansion &&
                                !(obj.mount.external_storage && scoped_on);
            if (expand) {
              lured.override_set = true;
              lured.override_uid = a.uid;
              if (cfg_.expansion.prescoped_assume_rex_wex && !scoped_on) {
                lured.rex = true;
                lured.wex = true;
              }
            }
            if (allowed(v, lured, obj, Op::Search)) {
              found.push_back({obj.id, v.id, a.id, IvKind::Pathname});
            }
          }
        }

        for (const auto& iv : found) {
          ivs.insert(iv);
          if (!obj.mount.writable) continue;
          switch (iv.kind) {
            case IvKind::Read:
            case IvKind::Write:
            case IvKind::Exec:
              add_op(iv, OpKind::FileMod);
              break;
            case IvKind::Binding:
              if (squat_readable(v, ctx[v.id], a, obj)) {
                add_op(iv, OpKind::FileSquat);
              } else {
                prevented.insert({obj.id, v.id, a.id});
              }
              if (obj.mount.symlinks_allowed) add_op(iv, OpKind::LinkTraversal);
              break;
            case IvKind::Pathname:
              if (obj.mount.symlinks_allowed && !v.uses_file_provider) {
                add_op(iv, OpKind::LuringTraversal);
              }
              break;
          }
        }
      }
    }
  }

  out.ivs.assign(ivs.begin(), ivs.end());
  for (const auto& [key, source] : ops) {
    const auto& [o, v, a, k] = key;
    out.ops.push_back({o, v, a, k, source});
  }
  out.squat_prevented.assign(prevented.begin(), prevented.end());
  out.subjects = subjects_;
  out.objects = objects_;
  return out;
}

}  // namespace

AnalysisResult oracle_analyze(const Snapshot& s, const EngineConfig& cfg,
                              const OracleLimits& limits) {
  if (limits.enforce && (s.subjects.size() > limits.max_subjects ||
                         s.filesystem.size() > limits.max_objects)) {
    throw SizeGuardError(
        "snapshot too large for the oracle: " + std::to_string(s.subjects.size()) +
        " subjects, " + std::to_string(s.filesystem.size()) +
        " objects (limits " + std::to_string(limits.max_subjects) + " and " +
        std::to_string(limits.max_objects) + ")");
  }
  const auto report = validate_snapshot(s);
  if (report.has_errors()) {
    throw InvalidSnapshotError("snapshot has " +
                               std::to_string(report.error_count()) +
                               " validation error(s)");
  }
  return Oracle(s, cfg).run();
}

}  // namespace polyscope
