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

#include <gtest/gtest.h>

#include <algorithm>

#include "polyscope/analysis.hpp"
#include "polyscope/engine.hpp"
#include "polyscope/synthgen.hpp"
#include "test_util.hpp"

namespace polyscope {
namespace {

using testing::base_snapshot;
using testing::contains;
using testing::entry;
using testing::load_fixture;
using testing::object_id;
using testing::subject;
using testing::subject_id;

AnalysisResult run(const Snapshot& s) { return analyze(s, EngineConfig{}); }

std::size_t count_ops(const AnalysisResult& r, OpKind kind) {
  return static_cast<std::size_t>(std::count_if(
      r.ops.begin(), r.ops.end(),
      [&](const AttackOperation& op) { return op.kind == kind; }));
}

std::size_t count_ivs(const AnalysisResult& r, IvKind kind) {
  return static_cast<std::size_t>(std::count_if(
      r.ivs.begin(), r.ivs.end(),
      [&](const IntegrityViolation& iv) { return iv.kind == kind; }));
}

TEST(F1, IntegrityViolations) {
  const auto r = run(load_fixture("f1.json"));
  const auto a = subject_id(r, "untrusted_app");
  const auto v = subject_id(r, "system_server");
  const auto m = subject_id(r, "priv_app");
  const auto ota = object_id(r, "/sdcard/oem_log/ota.zip");
  const auto log = object_id(r, "/sdcard/oem_log");

  EXPECT_TRUE(contains(r.ivs, {ota, v, a, IvKind::Read}));
  EXPECT_TRUE(contains(r.ivs, {ota, m, a, IvKind::Read}));
  EXPECT_TRUE(contains(r.ivs, {log, v, a, IvKind::Binding}));
  EXPECT_TRUE(contains(r.ivs, {log, m, a, IvKind::Binding}));
  EXPECT_TRUE(contains(r.ivs, {log, v, a, IvKind::Pathname}));
  EXPECT_TRUE(contains(r.ivs, {log, m, a, IvKind::Pathname}));
  EXPECT_EQ(r.ivs.size(), 6u);
  EXPECT_TRUE(std::is_sorted(r.ivs.begin(), r.ivs.end()));
  for (const auto& iv : r.ivs) EXPECT_EQ(iv.adversary, a);
}

TEST(F1, NothingOnUnwritableObjects) {
  const auto r = run(load_fixture("f1.json"));
  const auto conf = object_id(r, "/data/system/conf");
  const auto tool = object_id(r, "/system/bin/tool");
  const auto pics = object_id(r, "/sdcard/Pictures");
  for (const auto& iv : r.ivs) {
    EXPECT_NE(iv.object, conf);
    EXPECT_NE(iv.object, tool);
    EXPECT_NE(iv.object, pics);
  }
}

TEST(F1, AttackOperations) {
  const auto r = run(load_fixture("f1.json"));
  EXPECT_EQ(count_ops(r, OpKind::FileMod), 2u);
  EXPECT_EQ(count_ops(r, OpKind::FileSquat), 2u);
  // /sdcard forbids symlinks.
  EXPECT_EQ(count_ops(r, OpKind::LinkTraversal), 0u);
  EXPECT_EQ(count_ops(r, OpKind::LuringTraversal), 0u);
  EXPECT_EQ(r.ops.size(), 4u);
  EXPECT_TRUE(r.squat_prevented.empty());
  for (const auto& op : r.ops) {
    if (op.kind == OpKind::FileSquat) {
      EXPECT_EQ(op.source_iv_kind, IvKind::Binding);
    }
    if (op.kind == OpKind::FileMod) {
      EXPECT_EQ(op.source_iv_kind, IvKind::Read);
    }
  }
}

TEST(F1, SymlinksEnableTraversals) {
  auto s = load_fixture("f1.json");
  for (auto& m : s.mounts) m.symlinks_allowed = true;
  const auto r = run(s);
  EXPECT_EQ(count_ops(r, OpKind::LinkTraversal), 2u);
  EXPECT_EQ(count_ops(r, OpKind::LuringTraversal), 2u);
  for (const auto& op : r.ops) {
    if (op.kind == OpKind::LuringTraversal) {
      EXPECT_EQ(op.source_iv_kind, IvKind::Pathname);
    }
  }
}

TEST(F1, FileProviderBlocksLuring) {
  auto s = load_fixture("f1.json");
  for (auto& m : s.mounts) m.symlinks_allowed = true;
  for (auto& d : s.subjects) {
    if (d.mac_label == "system_server") d.uses_file_provider = true;
  }
  const auto r = run(s);
  ASSERT_EQ(count_ops(r, OpKind::LuringTraversal), 1u);
  for (const auto& op : r.ops) {
    if (op.kind == OpKind::LuringTraversal) {
      EXPECT_EQ(op.victim, subject_id(r, "priv_app"));
    }
  }
}

TEST(F1, PathnameNeedsAcceptingVictim) {
  auto s = load_fixture("f1.json");
  for (auto& d : s.subjects) d.accepts_external_pathnames = false;
  const auto r = run(s);
  EXPECT_EQ(count_ivs(r, IvKind::Pathname), 0u);
  EXPECT_EQ(count_ivs(r, IvKind::Binding), 2u);
}

TEST(F1, WithoutLegacyNoThreat) {
  auto s = load_fixture("f1.json");
  for (auto& p : s.packages) p.legacy_storage = false;
  const auto r = run(s);
  EXPECT_TRUE(r.ivs.empty());
  EXPECT_TRUE(r.ops.empty());
}

TEST(F1Pre, VictimExpansionAddsPathnames) {
  const auto r = run(load_fixture("f1_pre.json"));
  const auto a = subject_id(r, "untrusted_app");
  const auto v = subject_id(r, "system_server");
  const auto m = subject_id(r, "priv_app");
  const auto pics = object_id(r, "/sdcard/Pictures");
  EXPECT_TRUE(contains(r.ivs, {pics, v, a, IvKind::Pathname}));
  EXPECT_TRUE(contains(r.ivs, {pics, m, a, IvKind::Pathname}));
  EXPECT_FALSE(contains(r.ivs, {pics, v, a, IvKind::Binding}));
  EXPECT_FALSE(contains(r.ivs, {pics, m, a, IvKind::Binding}));
}

TEST(F1Pre, NoVictimExpansionNoExtraPathnames) {
  EngineConfig cfg;
  cfg.expansion.victim_expansion = false;
  const auto r = analyze(load_fixture("f1_pre.json"), cfg);
  const auto pics = object_id(r, "/sdcard/Pictures");
  for (const auto& iv : r.ivs) EXPECT_NE(iv.object, pics);
}

TEST(Squat, PreventedWithoutReadPermission) {
  const auto r = run(load_fixture("squat.json"));
  ASSERT_EQ(r.ivs.size(), 1u);
  EXPECT_EQ(r.ivs[0].kind, IvKind::Binding);
  EXPECT_EQ(r.ivs[0].victim, subject_id(r, "priv_app"));
  ASSERT_EQ(r.squat_prevented.size(), 1u);
  EXPECT_EQ(count_ops(r, OpKind::FileSquat), 0u);
}

TEST(Squat, ReadPermissionTurnsPreventionIntoSquat) {
  auto s = load_fixture("squat.json");
  for (auto& p : s.packages) {
    if (p.name == "com.victim.app") {
      p.declared_permissions.insert(std::string(kPermReadExternalStorage));
    }
  }
  const auto r = run(s);
  EXPECT_TRUE(r.squat_prevented.empty());
  EXPECT_EQ(count_ops(r, OpKind::FileSquat), 1u);
}

TEST(Squat, DisabledScopedStorageNeverPrevents) {
  auto s = load_fixture("squat.json");
  s.meta.scoped_storage_enabled = false;
  const auto r = run(s);
  EXPECT_TRUE(r.squat_prevented.empty());
  EXPECT_EQ(count_ops(r, OpKind::FileSquat), 1u);
}

Snapshot readonly_snapshot(bool writable) {
  auto s = base_snapshot();
  s.mounts.push_back({"/vendor", writable, true, false});
  s.filesystem = {entry("/vendor/etc", EntryKind::Dir, 0, 0777, "vd"),
                  entry("/vendor/etc/cfg", EntryKind::File, 0, 0666, "vf")};
  s.mac_policy.te_rules = {{"untrusted_app", "vd", TeClass::Dir, 0x7f},
                           {"untrusted_app", "vf", TeClass::File, 0x7f},
                           {"system_server", "vd", TeClass::Dir, 0x7f},
                           {"system_server", "vf", TeClass::File, 0x7f}};
  s.subjects = {subject("untrusted_app", 10001), subject("system_server", 1000)};
  return s;
}

TEST(Ops, ReadOnlyMountKeepsIvsButDropsOps) {
  const auto ro = run(readonly_snapshot(false));
  EXPECT_FALSE(ro.ivs.empty());
  EXPECT_TRUE(ro.ops.empty());
  EXPECT_TRUE(ro.squat_prevented.empty());

  const auto rw = run(readonly_snapshot(true));
  EXPECT_EQ(rw.ivs, ro.ivs);
  EXPECT_EQ(count_ops(rw, OpKind::FileMod), 1u);
  EXPECT_EQ(count_ops(rw, OpKind::FileSquat), 1u);
  EXPECT_EQ(count_ops(rw, OpKind::LinkTraversal), 1u);
}

TEST(Ops, FileModKeepsSmallestSourceKind) {
  auto s = readonly_snapshot(true);
  s.filesystem[1].mode = 0777;
  const auto r = run(s);
  // Read, Write and Exec IVs collapse into one FileMod.
  EXPECT_EQ(count_ivs(r, IvKind::Read), 1u);
  EXPECT_EQ(count_ivs(r, IvKind::Write), 1u);
  EXPECT_EQ(count_ivs(r, IvKind::Exec), 1u);
  for (const auto& op : r.ops) {
    if (op.kind == OpKind::FileMod) {
      EXPECT_EQ(op.source_iv_kind, IvKind::Read);
    }
  }
}

TEST(Victims, SameLevelIsNotAThreat) {
  auto s = readonly_snapshot(true);
  s.subjects[1].privilege_level = PrivilegeLevel::T1;
  EXPECT_TRUE(run(s).ivs.empty());
}

TEST(Victims, UnmappedSubjectsAreOnlyAdversaries) {
  auto s = readonly_snapshot(true);
  s.subjects.push_back(subject("mystery_daemon", 1234));
  s.mac_policy.te_rules.push_back({"mystery_daemon", "vf", TeClass::File, 0x7f});
  const auto r = run(s);
  const auto mystery = subject_id(r, "mystery_daemon");
  for (const auto& iv : r.ivs) EXPECT_NE(iv.victim, mystery);
  bool adversary = false;
  for (const auto& iv : r.ivs) adversary = adversary || iv.adversary == mystery;
  EXPECT_TRUE(adversary);
}

TEST(Rules, SingleRuleFunctionsAgreeWithAnalyzeObject) {
  GenParams p;
  p.seed = 11;
  p.subject_count = 25;
  p.object_count = 200;
  const auto s = generate(p);
  const auto subjects = build_subjects(s);
  const auto objects = build_objects(s, subjects);
  const AnalysisContext ctx(s, subjects, objects, ExpansionConfig{});
  for (const auto& o : objects) {
    const auto found = analyze_object(o, ctx);
    std::vector<IntegrityViolation> joined = compute_file_ivs(o, ctx);
    const auto b = compute_binding_ivs(o, ctx);
    const auto n = compute_pathname_ivs(o, ctx);
    joined.insert(joined.end(), b.begin(), b.end());
    joined.insert(joined.end(), n.begin(), n.end());
    std::sort(joined.begin(), joined.end());
    if (o.entry.kind == EntryKind::Symlink) joined.clear();
    ASSERT_EQ(found.ivs, joined) << o.entry.path;
    const auto ops = compute_attack_ops(found.ivs, o, ctx);
    ASSERT_EQ(found.ops, ops.ops);
    ASSERT_EQ(found.squat_prevented, ops.squat_prevented);
  }
}

// With Scoped Storage on, victim expansion is the identity on external
// storage, so pathname IVs there are binding IVs of accepting victims.
TEST(Rules, ScopedExternalPathnamesMatchBindings) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    GenParams p;
    p.seed = seed;
    p.subject_count = 30;
    p.object_count = 300;
    const auto r = run(generate(p));
    std::vector<std::tuple<ObjectId, SubjectId, SubjectId>> bind, path;
    for (const auto& iv : r.ivs) {
      if (!r.objects[iv.object].mount.external_storage) continue;
      const auto t = std::make_tuple(iv.object, iv.victim, iv.adversary);
      if (iv.kind == IvKind::Pathname) path.push_back(t);
      if (iv.kind == IvKind::Binding &&
          r.subjects[iv.victim].accepts_external_pathnames) {
        bind.push_back(t);
      }
    }
    EXPECT_EQ(bind, path) << "seed " << seed;
  }
}

TEST(Rules, SymlinkObjectsYieldNothing) {
  auto s = base_snapshot();
  s.filesystem = {entry("/data/l", EntryKind::Symlink, 0, 0777, "t")};
  s.mac_policy.te_rules = {{"untrusted_app", "t", TeClass::LnkFile, 0x7f}};
  s.subjects = {subject("untrusted_app", 10001), subject("system_server", 1000)};
  s.mac_policy.te_rules.push_back({"system_server", "t", TeClass::LnkFile, 0x7f});
  const auto r = run(s);
  EXPECT_TRUE(r.ivs.empty());
  EXPECT_TRUE(r.ops.empty());
}

}  // namespace
}  // namespace polyscope
