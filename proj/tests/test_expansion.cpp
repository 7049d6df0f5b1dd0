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

#include "polyscope/expansion.hpp"
#include "test_util.hpp"

namespace polyscope {
namespace {

using testing::base_snapshot;
using testing::entry;
using testing::load_fixture;
using testing::subject;

Snapshot logs_snapshot() {
  auto s = base_snapshot();
  s.permission_group_map["android.permission.READ_LOGS"] = {1007};
  s.packages = {{"com.a", 10001, {"android.permission.READ_LOGS"}, false, false},
                {"com.b", 10002, {}, false, false}};
  s.subjects = {subject("untrusted_app", 10001), subject("untrusted_app", 10002)};
  return s;
}

bool has_gid(const AccessContext& c, Gid g) {
  return std::binary_search(c.effective_groups.begin(), c.effective_groups.end(), g);
}

TEST(AdversaryExpansion, PermissionGrantsGroup) {
  const auto s = logs_snapshot();
  const auto subjects = build_subjects(s);
  const auto ctx = expand_adversary(subjects[0], s, ExpansionConfig{});
  EXPECT_TRUE(has_gid(ctx, 1007));
  EXPECT_TRUE(has_gid(ctx, 10001));
}

TEST(AdversaryExpansion, NoPermissionsIsIdentity) {
  const auto s = logs_snapshot();
  const auto subjects = build_subjects(s);
  EXPECT_EQ(expand_adversary(subjects[1], s, ExpansionConfig{}),
            base_context(subjects[1]));
}

TEST(AdversaryExpansion, DisabledIsIdentity) {
  const auto s = logs_snapshot();
  const auto subjects = build_subjects(s);
  ExpansionConfig cfg;
  cfg.adversary_expansion = false;
  EXPECT_EQ(expand_adversary(subjects[0], s, cfg), base_context(subjects[0]));
}

TEST(AdversaryExpansion, WexOnlyBeforeScopedStorage) {
  const auto pre = load_fixture("f1_pre.json");
  const auto pre_subjects = build_subjects(pre);
  const Subject* a = nullptr;
  for (const auto& x : pre_subjects) {
    if (x.mac_label == "untrusted_app") a = &x;
  }
  ASSERT_NE(a, nullptr);
  EXPECT_TRUE(expand_adversary(*a, pre, ExpansionConfig{})
                  .assumed_storage_perms.has(StoragePerms::kWex));

  auto scoped = pre;
  scoped.meta.scoped_storage_enabled = true;
  EXPECT_FALSE(expand_adversary(*a, scoped, ExpansionConfig{})
                   .assumed_storage_perms.has(StoragePerms::kWex));
}

TEST(AdversaryExpansion, StoragePermissionsAreAssumed) {
  auto s = base_snapshot();
  s.packages = {{"com.a", 10001,
                 {std::string(kPermReadExternalStorage),
                  std::string(kPermManageExternalStorage)},
                 false, false}};
  s.subjects = {subject("untrusted_app", 10001)};
  const auto subjects = build_subjects(s);
  const auto ctx = expand_adversary(subjects[0], s, ExpansionConfig{});
  EXPECT_TRUE(ctx.assumed_storage_perms.has(StoragePerms::kRex));
  EXPECT_TRUE(ctx.assumed_storage_perms.has(StoragePerms::kMes));
}

struct VictimCase {
  Snapshot s;
  std::vector<Subject> subjects;
  std::vector<FsObject> objects;

  explicit VictimCase(bool scoped) : s(base_snapshot(scoped)) {
    auto ext = entry("/sdcard/d", EntryKind::Dir, 10099, 0700, "t");
    ext.scoped = ScopedMeta{"com.adv", Visibility::Shared};
    s.filesystem = {ext, entry("/data/d", EntryKind::Dir, 10099, 0700, "t")};
    s.subjects = {subject("untrusted_app", 10099), subject("system_server", 1000)};
    subjects = build_subjects(s);
    objects = build_objects(s, subjects);
  }
  const Subject& adversary() const { return subjects[1]; }
  const Subject& victim() const { return subjects[0]; }
};

TEST(VictimExpansion, ScopedExternalIsIdentity) {
  const VictimCase c(true);
  const auto base = base_context(c.victim());
  EXPECT_EQ(expand_victim(base, c.adversary(), c.objects[0], true, ExpansionConfig{}),
            base);
}

TEST(VictimExpansion, PreScopedExternalAssumesRexWex) {
  const VictimCase c(false);
  const auto ctx = expand_victim(base_context(c.victim()), c.adversary(),
                                 c.objects[0], false, ExpansionConfig{});
  EXPECT_TRUE(ctx.assumed_storage_perms.has(StoragePerms::kRex));
  EXPECT_TRUE(ctx.assumed_storage_perms.has(StoragePerms::kWex));
  EXPECT_EQ(ctx.dac_override_owner, std::optional<Uid>(10099));
}

TEST(VictimExpansion, PreScopedAssumptionCanBeTurnedOff) {
  const VictimCase c(false);
  ExpansionConfig cfg;
  cfg.prescoped_assume_rex_wex = false;
  const auto ctx = expand_victim(base_context(c.victim()), c.adversary(),
                                 c.objects[0], false, cfg);
  EXPECT_EQ(ctx.assumed_storage_perms.bits, 0);
}

TEST(VictimExpansion, InternalAdversaryObjectLooksWorldOpen) {
  const VictimCase c(true);
  const auto& obj = c.objects[1];
  const auto base = base_context(c.victim());
  EXPECT_FALSE(dac_allows(c.victim(), base, obj, Access::UseBinding));
  const auto ctx = expand_victim(base, c.adversary(), obj, true, ExpansionConfig{});
  EXPECT_TRUE(dac_allows(c.victim(), ctx, obj, Access::UseBinding));
  EXPECT_TRUE(dac_allows(c.victim(), ctx, obj, Access::WriteBinding));
  // Scoped Storage on: no storage permissions are assumed.
  EXPECT_EQ(ctx.assumed_storage_perms.bits, 0);
}

TEST(VictimExpansion, DisabledIsIdentity) {
  const VictimCase c(false);
  ExpansionConfig cfg;
  cfg.victim_expansion = false;
  const auto base = base_context(c.victim());
  EXPECT_EQ(expand_victim(base, c.adversary(), c.objects[1], false, cfg), base);
}

}  // namespace
}  // namespace polyscope
