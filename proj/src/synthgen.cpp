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

#include "polyscope/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "polyscope/errors.hpp"

namespace polyscope {

namespace {

__extension__ using Wide = unsigned __int128;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

const std::string kPerm = "android.permission.";

// Android gids behind a few permissions.
constexpr Gid kLogGid = 1007;
constexpr Gid kSdcardRwGid = 1015;
constexpr Gid kMediaRwGid = 1023;
constexpr Gid kSdcardRGid = 1028;
constexpr Gid kInetGid = 3003;
constexpr Gid kEverybodyGid = 9997;

enum Stream : std::uint64_t {
  kSubjects = 1,
  kRules = 2,
  kObjects = 3,
  kConsents = 4,
};

struct LabelChoice {
  std::string label;
  // Set for labels outside the built-in privilege map.
  std::optional<PrivilegeLevel> explicit_level;
};

LabelChoice pick_label(PrivilegeLevel level, CounterRng& rng) {
  static const std::vector<std::string> t1 = {
      "untrusted_app",    "untrusted_app_25", "untrusted_app_27",
      "untrusted_app_29", "isolated_app",     "webview_zygote"};
  switch (level) {
    case PrivilegeLevel::T1:
      // A few labels nobody mapped; they only ever act as adversaries.
      if (rng.chance(0.02)) {
        return {"unconfined_" + std::to_string(rng.below(3)), std::nullopt};
      }
      return {t1[rng.below(t1.size())], std::nullopt};
    case PrivilegeLevel::T2:
      return {rng.chance(0.5) ? "priv_app" : "platform_app", std::nullopt};
    case PrivilegeLevel::T3:
      if (rng.chance(0.5)) {
        return {rng.chance(0.5) ? "bluetooth" : "mediaserver", std::nullopt};
      }
      return {"vendor_hal_" + std::to_string(rng.below(4)), PrivilegeLevel::T3};
    case PrivilegeLevel::T4:
      if (rng.chance(0.6)) return {"system_server", std::nullopt};
      return {"system_daemon_" + std::to_string(rng.below(4)),
              PrivilegeLevel::T4};
    case PrivilegeLevel::T5:
      if (rng.chance(0.3)) return {"vold", PrivilegeLevel::T5};
      return {rng.chance(0.5) ? "init" : "kernel", std::nullopt};
  }
  return {"untrusted_app", std::nullopt};
}

PrivilegeLevel pick_level(CounterRng& rng) {
  const double u = rng.uniform();
  if (u < 0.55) return PrivilegeLevel::T1;
  if (u < 0.75) return PrivilegeLevel::T2;
  if (u < 0.85) return PrivilegeLevel::T3;
  if (u < 0.95) return PrivilegeLevel::T4;
  return PrivilegeLevel::T5;
}

std::set<std::uint32_t> all_categories() {
  std::set<std::uint32_t> out;
  for (std::uint32_t c = 0; c < 16; ++c) out.insert(c);
  return out;
}

struct AppRef {
  std::string package;
  Uid uid;
};

void make_subjects(const GenParams& p, Snapshot& s, std::vector<AppRef>& apps) {
  CounterRng rng(p.seed, kSubjects);
  std::vector<Uid> app_uids;
  for (std::size_t i = 0; i < p.subject_count; ++i) {
    PrivilegeLevel level = pick_level(rng);
    if (p.subject_count >= 5 && i == 0) level = PrivilegeLevel::T2;
    if (p.subject_count >= 5 && i == 1) level = PrivilegeLevel::T4;
    LabelChoice label = pick_label(level, rng);
    if (p.subject_count >= 5 && i == 0) label = {"priv_app", std::nullopt};
    if (p.subject_count >= 5 && i == 1) label = {"system_server", std::nullopt};

    SubjectDecl d;
    d.mac_label = label.label;
    d.privilege_level = label.explicit_level;
    const bool app =
        level == PrivilegeLevel::T1 || level == PrivilegeLevel::T2;
    if (app) {
      d.uid = static_cast<Uid>(10000 + i);
      if (!app_uids.empty() && rng.chance(0.08)) {
        d.uid = app_uids[rng.below(app_uids.size())];
      }
      d.gid = d.uid;
      d.supplementary_groups = {kEverybodyGid};
      if (rng.chance(level == PrivilegeLevel::T1 ? 0.2 : 0.5)) {
        d.mls_categories = level == PrivilegeLevel::T1
                               ? std::set<std::uint32_t>{static_cast<std::uint32_t>(rng.below(16))}
                               : all_categories();
      }
    } else if (level == PrivilegeLevel::T5) {
      d.uid = 0;
      d.gid = 0;
      d.mls_categories = all_categories();
    } else {
      d.uid = level == PrivilegeLevel::T4 && rng.chance(0.7)
                  ? 1000
                  : static_cast<Uid>(1001 + rng.below(40));
      d.gid = d.uid;
      for (Gid g : {kLogGid, kSdcardRwGid, kMediaRwGid, kInetGid, kSdcardRGid}) {
        if (rng.chance(0.3)) d.supplementary_groups.insert(g);
      }
      d.mls_categories = all_categories();
    }

    d.accepts_external_pathnames = rng.chance(0.4);
    d.uses_file_provider = rng.chance(0.3);
    if (p.subject_count >= 5 && i == 1) {
      d.accepts_external_pathnames = true;
      d.uses_file_provider = false;
    }

    if (app) {
      PackageDecl pkg;
      pkg.name = "com.synth.app" + std::to_string(i);
      pkg.uid = d.uid;
      pkg.legacy_storage = rng.chance(p.legacy_fraction);
      pkg.uses_file_provider = rng.chance(0.5);
      if (rng.chance(0.7)) pkg.declared_permissions.insert(kPerm + "INTERNET");
      if (rng.chance(0.4)) {
        pkg.declared_permissions.insert(std::string(kPermReadExternalStorage));
      }
      if (rng.chance(0.25)) {
        pkg.declared_permissions.insert(std::string(kPermWriteExternalStorage));
      }
      if (rng.chance(0.03) || (p.subject_count >= 5 && i == 0)) {
        pkg.declared_permissions.insert(std::string(kPermManageExternalStorage));
      }
      if (rng.chance(0.05)) pkg.declared_permissions.insert(kPerm + "READ_LOGS");
      if (rng.chance(0.03)) {
        pkg.declared_permissions.insert(kPerm + "WRITE_MEDIA_STORAGE");
      }
      if (rng.chance(0.2)) pkg.declared_permissions.insert(kPerm + "CAMERA");
      // Half the declarations leave packages to the uid lookup.
      if (rng.chance(0.5)) d.packages.insert(pkg.name);
      apps.push_back({pkg.name, pkg.uid});
      app_uids.push_back(d.uid);
      s.packages.push_back(std::move(pkg));
    }
    s.subjects.push_back(std::move(d));
  }
}

void make_rules(const GenParams& p, Snapshot& s,
                const std::vector<std::string>& types) {
  CounterRng rng(p.seed, kRules);
  std::set<std::string> label_set;
  for (const auto& d : s.subjects) label_set.insert(d.mac_label);
  const std::vector<std::string> labels(label_set.begin(), label_set.end());
  if (labels.empty() || types.empty()) return;

  // Random popularity ranking of the types; rank r gets about L / r^skew
  // labels holding rules on it.
  std::vector<std::size_t> order(types.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }

  std::vector<std::size_t> pick(labels.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::string& type = types[order[rank]];
    const double share =
        static_cast<double>(labels.size()) /
        std::pow(static_cast<double>(rank + 1), p.skew);
    const std::size_t holders = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(share)), 1, labels.size());
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (std::size_t h = 0; h < holders; ++h) {
      std::swap(pick[h], pick[h + rng.below(labels.size() - h)]);
      const std::string& label = labels[pick[h]];
      const bool app_label = label.starts_with("untrusted_app") ||
                             label.starts_with("isolated_app") ||
                             label.starts_with("webview");
      const double write_p = app_label ? 0.15 : 0.35;

      std::uint8_t file = te_perm::kRead | te_perm::kOpen;
      if (rng.chance(write_p)) file |= te_perm::kWrite;
      if (rng.chance(0.15)) file |= te_perm::kExecute;
      s.mac_policy.te_rules.push_back({label, type, TeClass::File, file});

      std::uint8_t dir = te_perm::kRead | te_perm::kOpen | te_perm::kSearch;
      if (rng.chance(write_p)) {
        dir |= te_perm::kWrite | te_perm::kAddName | te_perm::kRemoveName;
      }
      s.mac_policy.te_rules.push_back({label, type, TeClass::Dir, dir});

      if (rng.chance(0.3)) {
        s.mac_policy.te_rules.push_back(
            {label, type, TeClass::LnkFile, te_perm::kRead});
      }
    }
  }
}

std::uint16_t pick_mode(CounterRng& rng, EntryKind kind,
                        std::initializer_list<std::pair<std::uint16_t, double>> dir,
                        std::initializer_list<std::pair<std::uint16_t, double>> file) {
  if (kind == EntryKind::Symlink) return 0777;
  const auto& table = kind == EntryKind::Dir ? dir : file;
  double u = rng.uniform();
  for (const auto& [mode, w] : table) {
    if (u < w) return mode;
    u -= w;
  }
  return std::prev(table.end())->first;
}

void make_objects(const GenParams& p, Snapshot& s,
                  const std::vector<AppRef>& apps,
                  const std::vector<std::string>& ext_types,
                  const std::vector<std::string>& int_types) {
  CounterRng rng(p.seed, kObjects);
  const bool legacy_root_allowed =
      !(p.scoped_storage_enabled && p.legacy_fraction == 0.0);
  static const std::vector<std::string> shared_areas = {
      "Pictures", "DCIM", "Download", "Music", "Documents"};
  static const std::vector<std::string> legacy_areas = {
      "oem_log", ".thumbnails", "tmp", "logs"};

  s.filesystem.reserve(p.object_count);
  for (std::size_t i = 0; i < p.object_count; ++i) {
    FsEntry e;
    const double k = rng.uniform();
    e.kind = k < 0.3 ? EntryKind::Dir
                     : (k < 0.95 ? EntryKind::File : EntryKind::Symlink);
    const std::string leaf = "/n" + std::to_string(i);
    if (rng.chance(0.1)) {
      e.mls_categories.insert(static_cast<std::uint32_t>(rng.below(16)));
    }

    if (rng.chance(p.external_fraction)) {
      const std::string root = rng.chance(0.25) ? "/storage/usb" : "/sdcard";
      e.selinux_type = ext_types[rng.below(ext_types.size())];
      const AppRef* app = apps.empty() ? nullptr : &apps[rng.below(apps.size())];
      const double v = rng.uniform();
      ScopedMeta meta;
      if (v < 0.2 && legacy_root_allowed) {
        meta.visibility = Visibility::LegacyRoot;
        e.path = root + "/" + legacy_areas[rng.below(legacy_areas.size())] + leaf;
        e.dac_uid = kMediaRwGid;
        e.dac_gid = kMediaRwGid;
        e.mode = pick_mode(rng, e.kind, {{0777, 0.3}, {0775, 0.4}, {0771, 0.3}},
                           {{0666, 0.3}, {0664, 0.4}, {0660, 0.3}});
      } else if (v < 0.6) {
        meta.visibility = Visibility::Private;
        meta.owner_package = app ? app->package : std::string("system.media");
        e.path = root + "/Android/data/" + *meta.owner_package + leaf;
        e.dac_uid = app ? app->uid : kMediaRwGid;
        e.dac_gid = kMediaRwGid;
        e.mode = pick_mode(rng, e.kind, {{0771, 0.9}, {0777, 0.1}},
                           {{0660, 0.9}, {0666, 0.1}});
      } else {
        meta.visibility = Visibility::Shared;
        meta.owner_package = app ? app->package : std::string("system.media");
        e.path = root + "/" + shared_areas[rng.below(shared_areas.size())] + leaf;
        e.dac_uid = app ? app->uid : kMediaRwGid;
        e.dac_gid = kMediaRwGid;
        e.mode = pick_mode(rng, e.kind, {{0775, 0.7}, {0770, 0.2}, {0777, 0.1}},
                           {{0664, 0.6}, {0660, 0.3}, {0666, 0.1}});
      }
      e.scoped = meta;
    } else {
      e.selinux_type = int_types[rng.below(int_types.size())];
      const double a = rng.uniform();
      if (a < 0.2) {
        e.path = "/system/bin" + leaf;
        e.mode = pick_mode(rng, e.kind, {{0755, 1.0}}, {{0755, 0.6}, {0644, 0.4}});
      } else if (a < 0.3) {
        e.path = "/vendor/etc" + leaf;
        e.mode = pick_mode(rng, e.kind, {{0755, 1.0}}, {{0644, 1.0}});
      } else if (a < 0.55) {
        e.path = "/data/misc" + leaf;
        e.dac_uid = rng.chance(0.7) ? 1000 : 0;
        e.dac_gid = rng.chance(0.3) ? kLogGid : e.dac_uid;
        e.mode = pick_mode(rng, e.kind, {{0770, 0.5}, {0771, 0.4}, {0777, 0.1}},
                           {{0660, 0.5}, {0640, 0.4}, {0666, 0.1}});
      } else if (a < 0.85 && !apps.empty()) {
        const AppRef& app = apps[rng.below(apps.size())];
        e.path = "/data/data/" + app.package + leaf;
        e.dac_uid = app.uid;
        e.dac_gid = app.uid;
        e.mode = pick_mode(rng, e.kind, {{0700, 0.95}, {0777, 0.05}},
                           {{0600, 0.95}, {0666, 0.05}});
      } else {
        e.path = (rng.chance(0.5) ? "/cache" : "/dev/socket") + leaf;
        e.dac_uid = 1000;
        e.dac_gid = rng.chance(0.5) ? kInetGid : 1000;
        e.mode = pick_mode(rng, e.kind, {{0775, 0.6}, {0777, 0.4}},
                           {{0664, 0.6}, {0666, 0.4}});
      }
    }
    s.filesystem.push_back(std::move(e));
  }
}

void make_consents(const GenParams& p, Snapshot& s,
                   const std::vector<AppRef>& apps) {
  if (apps.empty()) return;
  CounterRng rng(p.seed, kConsents);
  std::vector<const FsEntry*> shared_dirs;
  for (const auto& e : s.filesystem) {
    if (e.kind == EntryKind::Dir && e.scoped &&
        e.scoped->visibility == Visibility::Shared) {
      shared_dirs.push_back(&e);
    }
  }
  const std::size_t n = std::min<std::size_t>(3, shared_dirs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const FsEntry& dir = *shared_dirs[rng.below(shared_dirs.size())];
    const AppRef& app = apps[rng.below(apps.size())];
    s.user_consents.push_back(
        {app.package, dir.path,
         static_cast<std::uint8_t>(consent_access::kRead | consent_access::kWrite)});
  }
}

}  // namespace

std::uint64_t CounterRng::next() {
  return mix64(mix64(seed_ ^ mix64(stream_)) + counter_++);
}

double CounterRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  if (bound == 0) return 0;
  return static_cast<std::uint64_t>(
      (static_cast<Wide>(next()) * bound) >> 64);
}

Snapshot generate(const GenParams& params) {
  auto check_fraction = [](const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValueError(name, "must be within [0, 1]");
  };
  check_fraction("legacy_fraction", params.legacy_fraction);
  check_fraction("external_fraction", params.external_fraction);
  if (!(params.skew >= 0.0) || !std::isfinite(params.skew)) {
    throw ValueError("skew", "must be a finite non-negative number");
  }

  Snapshot s;
  s.meta.schema = std::string(kSnapshotSchema);
  s.meta.device = "synthetic-" + std::to_string(params.seed);
  s.meta.android_version = params.scoped_storage_enabled ? "11" : "9";
  s.meta.scoped_storage_enabled = params.scoped_storage_enabled;

  s.mounts = {
      {"/", true, true, false},
      {"/system", false, true, false},
      {"/vendor", false, true, false},
      {"/data", true, true, false},
      {"/sdcard", true, false, true},
      {"/storage/usb", true, true, true},
  };
  s.permission_group_map = {
      {kPerm + "READ_LOGS", {kLogGid}},
      {kPerm + "WRITE_MEDIA_STORAGE", {kMediaRwGid}},
      {kPerm + "INTERNET", {kInetGid}},
      {std::string(kPermWriteExternalStorage), {kSdcardRwGid}},
      {std::string(kPermReadExternalStorage), {kSdcardRGid}},
  };

  std::vector<AppRef> apps;
  make_subjects(params, s, apps);

  std::vector<std::string> ext_types, int_types;
  const std::size_t n_int =
      std::clamp<std::size_t>(params.object_count / 400, 6, 300);
  const std::size_t n_ext =
      std::clamp<std::size_t>(params.object_count / 1000, 3, 100);
  for (std::size_t k = 0; k < n_int; ++k) {
    int_types.push_back("int_type_" + std::to_string(k));
  }
  for (std::size_t k = 0; k < n_ext; ++k) {
    ext_types.push_back("ext_type_" + std::to_string(k));
  }
  std::vector<std::string> types = int_types;
  types.insert(types.end(), ext_types.begin(), ext_types.end());
  make_rules(params, s, types);

  make_objects(params, s, apps, ext_types, int_types);
  make_consents(params, s, apps);
  return s;
}

}  // namespace polyscope
