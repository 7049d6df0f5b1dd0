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

#include "polyscope/errors.hpp"
#include "polyscope/snapshot.hpp"
#include "test_util.hpp"

namespace polyscope {
namespace {

using testing::base_snapshot;
using testing::entry;
using testing::load_fixture;
using testing::subject;

constexpr const char* kEmptyDoc = R"({
  "meta": {"schema": "polyscope-snapshot/1", "device": "d",
           "android_version": "11", "scoped_storage_enabled": true},
  "mounts": [], "filesystem": [], "mac_policy": {"te_rules": []},
  "subjects": [], "packages": [], "permission_group_map": {},
  "privilege_map": [], "user_consents": []
})";

std::string with_entry(const std::string& entry_json) {
  return std::string(R"({
  "meta": {"schema": "polyscope-snapshot/1", "device": "d",
           "android_version": "11", "scoped_storage_enabled": true},
  "mounts": [{"path_prefix": "/", "writable": true, "symlinks_allowed": true,
              "external_storage": false}],
  "filesystem": [)") +
         entry_json + R"(], "mac_policy": {"te_rules": []},
  "subjects": [], "packages": [], "permission_group_map": {},
  "privilege_map": [], "user_consents": []
})";
}

std::vector<std::string> codes(const ValidationReport& r) {
  std::vector<std::string> out;
  for (const auto& f : r.findings) out.push_back(f.code);
  return out;
}

bool has_code(const ValidationReport& r, const std::string& code) {
  for (const auto& f : r.findings) {
    if (f.code == code) return true;
  }
  return false;
}

TEST(SnapshotParse, EmptyDocumentHasNoSubjectsOrObjects) {
  const auto s = parse_snapshot(kEmptyDoc);
  EXPECT_TRUE(s.subjects.empty());
  EXPECT_TRUE(s.filesystem.empty());
  EXPECT_TRUE(s.meta.scoped_storage_enabled);
  EXPECT_FALSE(validate_snapshot(s).has_errors());
}

TEST(SnapshotParse, ModeIsTextualOctal) {
  const auto s = parse_snapshot(with_entry(
      R"({"path": "/a", "kind": "file", "dac_uid": 0, "dac_gid": 0,
          "mode": "0644", "selinux_type": "t", "mls_categories": []})"));
  ASSERT_EQ(s.filesystem.size(), 1u);
  EXPECT_EQ(s.filesystem[0].mode, 0644);
}

TEST(SnapshotParse, ModeWithSpecialBits) {
  const auto s = parse_snapshot(with_entry(
      R"({"path": "/a", "kind": "dir", "dac_uid": 0, "dac_gid": 0,
          "mode": "1777", "selinux_type": "t", "mls_categories": []})"));
  EXPECT_EQ(s.filesystem[0].mode, 01777);
}

TEST(SnapshotParse, ModeOutOfRangeIsValueError) {
  EXPECT_THROW(parse_snapshot(with_entry(
                   R"({"path": "/a", "kind": "file", "dac_uid": 0, "dac_gid": 0,
                       "mode": "17777", "selinux_type": "t", "mls_categories": []})")),
               ValueError);
}

TEST(SnapshotParse, NonOctalModeIsValueError) {
  EXPECT_THROW(parse_snapshot(with_entry(
                   R"({"path": "/a", "kind": "file", "dac_uid": 0, "dac_gid": 0,
                       "mode": "0698", "selinux_type": "t", "mls_categories": []})")),
               ValueError);
}

TEST(SnapshotParse, NegativeUidIsValueError) {
  EXPECT_THROW(parse_snapshot(with_entry(
                   R"({"path": "/a", "kind": "file", "dac_uid": -1, "dac_gid": 0,
                       "mode": "0644", "selinux_type": "t", "mls_categories": []})")),
               ValueError);
}

TEST(SnapshotParse, UnknownKindIsValueError) {
  EXPECT_THROW(parse_snapshot(with_entry(
                   R"({"path": "/a", "kind": "socket", "dac_uid": 0, "dac_gid": 0,
                       "mode": "0644", "selinux_type": "t", "mls_categories": []})")),
               ValueError);
}

TEST(SnapshotParse, UnknownFieldIsSchemaError) {
  EXPECT_THROW(parse_snapshot(with_entry(
                   R"({"path": "/a", "kind": "file", "dac_uid": 0, "dac_gid": 0,
                       "mode": "0644", "selinux_type": "t", "mls_categories": [],
                       "inode": 7})")),
               SchemaError);
}

TEST(SnapshotParse, MissingFieldIsSchemaError) {
  EXPECT_THROW(parse_snapshot(with_entry(
                   R"({"path": "/a", "kind": "file", "dac_uid": 0, "dac_gid": 0,
                       "selinux_type": "t", "mls_categories": []})")),
               SchemaError);
}

TEST(SnapshotParse, MistypedFieldIsSchemaError) {
  EXPECT_THROW(parse_snapshot(with_entry(
                   R"({"path": "/a", "kind": "file", "dac_uid": "0", "dac_gid": 0,
                       "mode": "0644", "selinux_type": "t", "mls_categories": []})")),
               SchemaError);
}

TEST(SnapshotParse, SyntaxErrorCarriesPosition) {
  try {
    parse_snapshot("{\n  \"meta\": {,\n}");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(SnapshotParse, FixtureF1Counts) {
  const auto s = load_fixture("f1.json");
  EXPECT_EQ(s.subjects.size(), 3u);
  EXPECT_EQ(s.filesystem.size(), 6u);
  EXPECT_TRUE(s.meta.scoped_storage_enabled);
}

TEST(SnapshotParse, MissingFileIsIoError) {
  EXPECT_THROW(load_snapshot_file("/nonexistent/snapshot.json"), IoError);
}

TEST(SnapshotSerialize, RoundTripsFixtures) {
  for (const char* name : {"f1.json", "f1_pre.json", "squat.json", "broken.json"}) {
    const auto s = load_fixture(name);
    const auto text = serialize_snapshot(s);
    EXPECT_EQ(parse_snapshot(text), s) << name;
    EXPECT_EQ(serialize_snapshot(parse_snapshot(text)), text) << name;
  }
}

TEST(SnapshotSerialize, OptionalFieldsSurvive) {
  auto s = base_snapshot();
  auto e = entry("/sdcard/x", EntryKind::Dir, 10, 0755, "t");
  e.scoped = ScopedMeta{std::nullopt, Visibility::LegacyRoot};
  e.mls_categories = {3, 12};
  s.filesystem.push_back(e);
  auto d = subject("priv_app", 10, PrivilegeLevel::T3);
  d.supplementary_groups = {1007, 3003};
  s.subjects.push_back(d);
  s.subjects.push_back(subject("system_server", 1000));
  s.user_consents.push_back({"com.a", "/sdcard/x", consent_access::kWrite});
  s.packages.push_back({"com.a", 10, {"android.permission.CAMERA"}, true, true});
  s.permission_group_map["android.permission.READ_LOGS"] = {1007};
  s.privilege_map.push_back({"vendor_*", PrivilegeLevel::T3});
  EXPECT_EQ(parse_snapshot(serialize_snapshot(s)), s);
}

TEST(SnapshotValidate, F1IsClean) {
  const auto r = validate_snapshot(load_fixture("f1.json"));
  EXPECT_TRUE(r.findings.empty()) << (r.findings.empty() ? "" : format_finding(r.findings[0]));
}

TEST(SnapshotValidate, ScopedMetadataOutsideExternal) {
  const auto r = validate_snapshot(load_fixture("broken.json"));
  EXPECT_EQ(codes(r), std::vector<std::string>{"SCOPED_OUTSIDE_EXTERNAL"});
  EXPECT_EQ(format_finding(r.findings[0]),
            "ERROR SCOPED_OUTSIDE_EXTERNAL /data/system/conf: scoped metadata "
            "on an entry outside external storage");
}

TEST(SnapshotValidate, UnmappedPrivilegeWarns) {
  auto s = base_snapshot();
  s.subjects.push_back(subject("vendor_foo", 2000));
  const auto r = validate_snapshot(s);
  EXPECT_FALSE(r.has_errors());
  EXPECT_TRUE(has_code(r, "UNMAPPED_PRIVILEGE"));
}

TEST(SnapshotValidate, StructuralErrors) {
  auto s = base_snapshot();
  s.mounts.push_back({"/sdcard", true, true, true});
  s.mounts.push_back({"relative", true, true, false});
  s.filesystem.push_back(entry("/a/../b", EntryKind::File, 0, 0644, "t"));
  s.filesystem.push_back(entry("/c", EntryKind::File, 0, 0644, "t"));
  s.filesystem.push_back(entry("/c", EntryKind::File, 0, 0644, "t"));
  s.filesystem.push_back(entry("/d", EntryKind::File, 0, 010000, "t"));
  s.mac_policy.te_rules.push_back({"a", "t", TeClass::File, 0});
  s.privilege_map.push_back({"a*b", PrivilegeLevel::T2});
  s.packages.push_back({"com.a", 1, {}, false, false});
  s.packages.push_back({"com.a", 2, {}, false, false});
  auto d = subject("a", 1, PrivilegeLevel::T1);
  d.packages = {"com.missing"};
  s.subjects.push_back(d);
  s.user_consents.push_back({"com.nope", "sdcard", consent_access::kRead});
  const auto r = validate_snapshot(s);
  for (const char* code :
       {"DUPLICATE_MOUNT", "MOUNT_PATH_INVALID", "PATH_NOT_NORMALIZED",
        "DUPLICATE_PATH", "MODE_OUT_OF_RANGE", "EMPTY_PERMS", "INVALID_PATTERN",
        "DUPLICATE_PACKAGE", "UNKNOWN_PACKAGE", "CONSENT_UNKNOWN_PACKAGE",
        "CONSENT_PATH_INVALID"}) {
    EXPECT_TRUE(has_code(r, code)) << code;
  }
}

TEST(SnapshotValidate, NoMountCoversPath) {
  Snapshot s = base_snapshot();
  s.mounts = {{"/data", true, true, false}};
  s.filesystem.push_back(entry("/system/x", EntryKind::File, 0, 0644, "t"));
  EXPECT_TRUE(has_code(validate_snapshot(s), "NO_MOUNT"));
}

TEST(SnapshotValidate, ScopedOwnerRules) {
  auto s = base_snapshot();
  auto priv = entry("/sdcard/p", EntryKind::Dir, 0, 0755, "t");
  priv.scoped = ScopedMeta{std::nullopt, Visibility::Private};
  auto root = entry("/sdcard/r", EntryKind::Dir, 0, 0755, "t");
  root.scoped = ScopedMeta{"com.a", Visibility::LegacyRoot};
  auto bare = entry("/sdcard/b", EntryKind::Dir, 0, 0755, "t");
  s.filesystem = {priv, root, bare};
  const auto r = validate_snapshot(s);
  EXPECT_TRUE(has_code(r, "SCOPED_OWNER_MISSING"));
  EXPECT_TRUE(has_code(r, "SCOPED_OWNER_UNEXPECTED"));
  EXPECT_TRUE(has_code(r, "SCOPED_META_MISSING"));
}

TEST(SnapshotValidate, WrongSchemaVersion) {
  auto s = base_snapshot();
  s.meta.schema = "polyscope-snapshot/2";
  EXPECT_TRUE(has_code(validate_snapshot(s), "SCHEMA_VERSION"));
}

TEST(SnapshotHelpers, LongestPrefixMount) {
  Snapshot s;
  s.mounts = {{"/", true, true, false}, {"/system", false, true, false}};
  EXPECT_EQ(mount_of(s, "/system/bin/sh").path_prefix, "/system");
  EXPECT_EQ(mount_of(s, "/").path_prefix, "/");
  EXPECT_EQ(mount_of(s, "/systemx").path_prefix, "/");
}

TEST(SnapshotHelpers, F1PicturesIsExternalWithoutSymlinks) {
  const auto s = load_fixture("f1.json");
  const auto& m = mount_of(s, "/sdcard/Pictures/x.jpg");
  EXPECT_TRUE(m.external_storage);
  EXPECT_FALSE(m.symlinks_allowed);
}

TEST(SnapshotHelpers, NoMountThrows) {
  Snapshot s;
  s.mounts = {{"/data", true, true, false}};
  EXPECT_THROW(mount_of(s, "/system"), NoMountError);
}

TEST(SnapshotHelpers, PathNormalization) {
  EXPECT_TRUE(is_normalized_path("/"));
  EXPECT_TRUE(is_normalized_path("/a/b"));
  EXPECT_FALSE(is_normalized_path(""));
  EXPECT_FALSE(is_normalized_path("a/b"));
  EXPECT_FALSE(is_normalized_path("/a/"));
  EXPECT_FALSE(is_normalized_path("/a//b"));
  EXPECT_FALSE(is_normalized_path("/a/./b"));
  EXPECT_FALSE(is_normalized_path("/a/.."));
}

TEST(SnapshotHelpers, PrefixIsComponentAware) {
  EXPECT_TRUE(path_has_prefix("/system/bin", "/system"));
  EXPECT_TRUE(path_has_prefix("/system", "/system"));
  EXPECT_FALSE(path_has_prefix("/systemx", "/system"));
  EXPECT_TRUE(path_has_prefix("/anything", "/"));
}

TEST(SnapshotHelpers, PrivilegeLevelNames) {
  EXPECT_EQ(parse_privilege_level("T0"), PrivilegeLevel::T1);
  EXPECT_EQ(parse_privilege_level("T5"), PrivilegeLevel::T5);
  EXPECT_FALSE(parse_privilege_level("T6").has_value());
  EXPECT_TRUE(is_storage_permission(kPermManageExternalStorage));
  EXPECT_FALSE(is_storage_permission("android.permission.CAMERA"));
}

}  // namespace
}  // namespace polyscope
