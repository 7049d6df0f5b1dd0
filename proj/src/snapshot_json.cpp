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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "polyscope/errors.hpp"
#include "polyscope/snapshot.hpp"

namespace polyscope {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view type_name(const json& j) { return j.type_name(); }

// Cursor over one JSON object that records where it is for error messages.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where)
      : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) {
      throw SchemaError(where_, "expected object, got " +
                                    std::string(type_name(j_)));
    }
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool known = false;
      for (auto allowed : keys) known = known || k == allowed;
      if (!known) throw SchemaError(field(k), "unknown field");
    }
  }

  std::string field(std::string_view key) const {
    return where_ + "." + std::string(key);
  }

  bool has(std::string_view key) const {
    auto it = j_.find(key);
    return it != j_.end() && !it->is_null();
  }

  const json& at(std::string_view key) const {
    auto it = j_.find(key);
    if (it == j_.end()) throw SchemaError(field(key), "missing field");
    return *it;
  }

  std::string str(std::string_view key) const {
    const auto& v = at(key);
    if (!v.is_string()) mistyped(key, "string", v);
    return v.get<std::string>();
  }

  bool boolean(std::string_view key) const {
    const auto& v = at(key);
    if (!v.is_boolean()) mistyped(key, "boolean", v);
    return v.get<bool>();
  }

  std::uint32_t u32(std::string_view key) const {
    return to_u32(at(key), field(key));
  }

  const json& array(std::string_view key) const {
    const auto& v = at(key);
    if (!v.is_array()) mistyped(key, "array", v);
    return v;
  }

  std::set<std::uint32_t> u32_set(std::string_view key) const {
    std::set<std::uint32_t> out;
    const auto& arr = array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.insert(to_u32(arr[i], field(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  std::set<std::string> str_set(std::string_view key) const {
    std::set<std::string> out;
    const auto& arr = array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) {
        throw SchemaError(field(key) + "[" + std::to_string(i) + "]",
                          "expected string");
      }
      out.insert(arr[i].get<std::string>());
    }
    return out;
  }

  static std::uint32_t to_u32(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) {
      const auto n = v.get<std::uint64_t>();
      if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw ValueError(where, "value out of range");
      }
      return static_cast<std::uint32_t>(n);
    }
    if (v.is_number_integer()) {
      // Signed and negative (non-negative integers parse as unsigned).
      throw ValueError(where, "must be non-negative");
    }
    throw SchemaError(where, "expected integer, got " +
                                 std::string(type_name(v)));
  }

 private:
  [[noreturn]] void mistyped(std::string_view key, std::string_view want,
                             const json& v) const {
    throw SchemaError(field(key), "expected " + std::string(want) + ", got " +
                                      std::string(type_name(v)));
  }

  const json& j_;
  std::string where_;
};

std::string item(std::string_view list, std::size_t i) {
  return std::string(list) + "[" + std::to_string(i) + "]";
}

std::uint16_t parse_mode(const ObjectReader& r) {
  const auto& v = r.at("mode");
  if (!v.is_string()) {
    throw SchemaError(r.field("mode"), "expected octal string such as \"0644\"");
  }
  const auto text = v.get<std::string>();
  if (text.empty() || text.size() > 5) {
    throw ValueError(r.field("mode"), "invalid octal mode '" + text + "'");
  }
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value, 8);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValueError(r.field("mode"), "invalid octal mode '" + text + "'");
  }
  if (value > 07777) {
    throw ValueError(r.field("mode"), "mode exceeds 07777");
  }
  return static_cast<std::uint16_t>(value);
}

EntryKind parse_kind(const ObjectReader& r) {
  const auto k = r.str("kind");
  if (k == "file") return EntryKind::File;
  if (k == "dir") return EntryKind::Dir;
  if (k == "symlink") return EntryKind::Symlink;
  throw ValueError(r.field("kind"), "unknown kind '" + k + "'");
}

Visibility parse_visibility(const ObjectReader& r) {
  const auto v = r.str("visibility");
  if (v == "private") return Visibility::Private;
  if (v == "shared") return Visibility::Shared;
  if (v == "legacy_root") return Visibility::LegacyRoot;
  throw ValueError(r.field("visibility"), "unknown visibility '" + v + "'");
}

TeClass parse_class(const ObjectReader& r) {
  const auto c = r.str("class");
  if (c == "file") return TeClass::File;
  if (c == "dir") return TeClass::Dir;
  if (c == "lnk_file") return TeClass::LnkFile;
  throw ValueError(r.field("class"), "unknown class '" + c + "'");
}

std::uint8_t parse_te_perms(const ObjectReader& r) {
  std::uint8_t bits = 0;
  for (const auto& p : r.str_set("perms")) {
    if (p == "read") bits |= te_perm::kRead;
    else if (p == "write") bits |= te_perm::kWrite;
    else if (p == "execute") bits |= te_perm::kExecute;
    else if (p == "open") bits |= te_perm::kOpen;
    else if (p == "search") bits |= te_perm::kSearch;
    else if (p == "add_name") bits |= te_perm::kAddName;
    else if (p == "remove_name") bits |= te_perm::kRemoveName;
    else throw ValueError(r.field("perms"), "unknown permission '" + p + "'");
  }
  if (bits == 0) throw ValueError(r.field("perms"), "must not be empty");
  return bits;
}

PrivilegeLevel parse_level(const ObjectReader& r, std::string_view key) {
  const auto text = r.str(key);
  auto level = parse_privilege_level(text);
  if (!level) throw ValueError(r.field(key), "unknown level '" + text + "'");
  return *level;
}

SnapshotMeta parse_meta(const json& j) {
  ObjectReader r(j, "meta");
  r.allow_only({"schema", "device", "android_version",
                "scoped_storage_enabled"});
  SnapshotMeta m;
  m.schema = r.str("schema");
  if (m.schema != kSnapshotSchema) {
    throw ValueError(r.field("schema"), "unsupported schema '" + m.schema +
                                            "'");
  }
  m.device = r.str("device");
  m.android_version = r.str("android_version");
  m.scoped_storage_enabled = r.boolean("scoped_storage_enabled");
  return m;
}

MountInfo parse_mount(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  r.allow_only({"path_prefix", "writable", "symlinks_allowed",
                "external_storage"});
  return MountInfo{r.str("path_prefix"), r.boolean("writable"),
                   r.boolean("symlinks_allowed"), r.boolean("external_storage")};
}

FsEntry parse_entry(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  r.allow_only({"path", "kind", "dac_uid", "dac_gid", "mode", "selinux_type",
                "mls_categories", "scoped"});
  FsEntry e;
  e.path = r.str("path");
  e.kind = parse_kind(r);
  e.dac_uid = r.u32("dac_uid");
  e.dac_gid = r.u32("dac_gid");
  e.mode = parse_mode(r);
  e.selinux_type = r.str("selinux_type");
  e.mls_categories = r.u32_set("mls_categories");
  if (r.has("scoped")) {
    ObjectReader sr(r.at("scoped"), r.field("scoped"));
    sr.allow_only({"owner_package", "visibility"});
    ScopedMeta meta;
    if (sr.has("owner_package")) meta.owner_package = sr.str("owner_package");
    meta.visibility = parse_visibility(sr);
    e.scoped = std::move(meta);
  }
  return e;
}

TeRule parse_rule(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  r.allow_only({"source", "target", "class", "perms"});
  return TeRule{r.str("source"), r.str("target"), parse_class(r),
                parse_te_perms(r)};
}

SubjectDecl parse_subject(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  r.allow_only({"mac_label", "mls_categories", "uid", "gid",
                "supplementary_groups", "packages", "privilege_level",
                "accepts_external_pathnames", "uses_file_provider"});
  SubjectDecl d;
  d.mac_label = r.str("mac_label");
  d.mls_categories = r.u32_set("mls_categories");
  d.uid = r.u32("uid");
  d.gid = r.u32("gid");
  d.supplementary_groups = r.u32_set("supplementary_groups");
  d.packages = r.str_set("packages");
  if (r.has("privilege_level")) {
    d.privilege_level = parse_level(r, "privilege_level");
  }
  d.accepts_external_pathnames = r.boolean("accepts_external_pathnames");
  d.uses_file_provider = r.boolean("uses_file_provider");
  return d;
}

PackageDecl parse_package(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  r.allow_only({"name", "uid", "declared_permissions", "legacy_storage",
                "uses_file_provider"});
  return PackageDecl{r.str("name"), r.u32("uid"),
                     r.str_set("declared_permissions"),
                     r.boolean("legacy_storage"),
                     r.boolean("uses_file_provider")};
}

UserConsent parse_consent(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  r.allow_only({"package", "path", "access"});
  UserConsent c{r.str("package"), r.str("path"), 0};
  for (const auto& a : r.str_set("access")) {
    if (a == "read") c.access |= consent_access::kRead;
    else if (a == "write") c.access |= consent_access::kWrite;
    else throw ValueError(r.field("access"), "unknown access '" + a + "'");
  }
  return c;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text,
                                                    std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string mode_string(std::uint16_t mode) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04o", static_cast<unsigned>(mode));
  return buf;
}

template <class Set>
ojson array_of(const Set& s) {
  ojson a = ojson::array();
  for (const auto& v : s) a.push_back(v);
  return a;
}

ojson te_perm_names(std::uint8_t bits) {
  ojson a = ojson::array();
  // Alphabetical, matching the order a std::set<std::string> would produce.
  if (bits & te_perm::kAddName) a.push_back("add_name");
  if (bits & te_perm::kExecute) a.push_back("execute");
  if (bits & te_perm::kOpen) a.push_back("open");
  if (bits & te_perm::kRead) a.push_back("read");
  if (bits & te_perm::kRemoveName) a.push_back("remove_name");
  if (bits & te_perm::kSearch) a.push_back("search");
  if (bits & te_perm::kWrite) a.push_back("write");
  return a;
}

}  // namespace

Snapshot parse_snapshot(std::string_view raw) {
  json doc;
  try {
    doc = json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error& e) {
    auto [line, column] = line_and_column(raw, e.byte);
    throw SyntaxError("malformed snapshot document", line, column);
  }

  ObjectReader top(doc, "$");
  top.allow_only({"meta", "mounts", "filesystem", "mac_policy", "subjects",
                  "packages", "permission_group_map", "privilege_map",
                  "user_consents"});

  Snapshot s;
  s.meta = parse_meta(top.at("meta"));

  const auto& mounts = top.array("mounts");
  for (std::size_t i = 0; i < mounts.size(); ++i) {
    s.mounts.push_back(parse_mount(mounts[i], item("mounts", i)));
  }
  const auto& fs = top.array("filesystem");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    s.filesystem.push_back(parse_entry(fs[i], item("filesystem", i)));
  }

  ObjectReader mac(top.at("mac_policy"), "mac_policy");
  mac.allow_only({"te_rules"});
  const auto& rules = mac.array("te_rules");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    s.mac_policy.te_rules.push_back(
        parse_rule(rules[i], item("mac_policy.te_rules", i)));
  }

  const auto& subjects = top.array("subjects");
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    s.subjects.push_back(parse_subject(subjects[i], item("subjects", i)));
  }
  const auto& packages = top.array("packages");
  for (std::size_t i = 0; i < packages.size(); ++i) {
    s.packages.push_back(parse_package(packages[i], item("packages", i)));
  }

  const auto& pgm = top.at("permission_group_map");
  if (!pgm.is_object()) {
    throw SchemaError("permission_group_map", "expected object");
  }
  for (const auto& [perm, gids] : pgm.items()) {
    const std::string where = "permission_group_map." + perm;
    if (!gids.is_array()) throw SchemaError(where, "expected array");
    auto& out = s.permission_group_map[perm];
    for (std::size_t i = 0; i < gids.size(); ++i) {
      out.insert(ObjectReader::to_u32(gids[i], item(where, i)));
    }
  }

  const auto& pmap = top.array("privilege_map");
  for (std::size_t i = 0; i < pmap.size(); ++i) {
    ObjectReader r(pmap[i], item("privilege_map", i));
    r.allow_only({"pattern", "level"});
    s.privilege_map.push_back(
        PrivilegeMapping{r.str("pattern"), parse_level(r, "level")});
  }

  const auto& consents = top.array("user_consents");
  for (std::size_t i = 0; i < consents.size(); ++i) {
    s.user_consents.push_back(
        parse_consent(consents[i], item("user_consents", i)));
  }
  return s;
}

Snapshot load_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return parse_snapshot(buf.str());
}

std::string serialize_snapshot(const Snapshot& s) {
  ojson doc;
  doc["meta"] = {{"schema", s.meta.schema},
                 {"device", s.meta.device},
                 {"android_version", s.meta.android_version},
                 {"scoped_storage_enabled", s.meta.scoped_storage_enabled}};

  doc["mounts"] = ojson::array();
  for (const auto& m : s.mounts) {
    doc["mounts"].push_back({{"path_prefix", m.path_prefix},
                             {"writable", m.writable},
                             {"symlinks_allowed", m.symlinks_allowed},
                             {"external_storage", m.external_storage}});
  }

  doc["filesystem"] = ojson::array();
  for (const auto& e : s.filesystem) {
    ojson j = {{"path", e.path},
               {"kind", to_string(e.kind)},
               {"dac_uid", e.dac_uid},
               {"dac_gid", e.dac_gid},
               {"mode", mode_string(e.mode)},
               {"selinux_type", e.selinux_type},
               {"mls_categories", array_of(e.mls_categories)}};
    if (e.scoped) {
      ojson sc;
      sc["owner_package"] = e.scoped->owner_package
                                ? ojson(*e.scoped->owner_package)
                                : ojson(nullptr);
      sc["visibility"] = to_string(e.scoped->visibility);
      j["scoped"] = std::move(sc);
    }
    doc["filesystem"].push_back(std::move(j));
  }

  ojson rules = ojson::array();
  for (const auto& r : s.mac_policy.te_rules) {
    rules.push_back({{"source", r.source_type},
                     {"target", r.target_type},
                     {"class", to_string(r.cls)},
                     {"perms", te_perm_names(r.perms)}});
  }
  doc["mac_policy"] = {{"te_rules", std::move(rules)}};

  doc["subjects"] = ojson::array();
  for (const auto& d : s.subjects) {
    ojson j = {{"mac_label", d.mac_label},
               {"mls_categories", array_of(d.mls_categories)},
               {"uid", d.uid},
               {"gid", d.gid},
               {"supplementary_groups", array_of(d.supplementary_groups)},
               {"packages", array_of(d.packages)}};
    j["privilege_level"] = d.privilege_level
                               ? ojson(to_string(*d.privilege_level))
                               : ojson(nullptr);
    j["accepts_external_pathnames"] = d.accepts_external_pathnames;
    j["uses_file_provider"] = d.uses_file_provider;
    doc["subjects"].push_back(std::move(j));
  }

  doc["packages"] = ojson::array();
  for (const auto& p : s.packages) {
    doc["packages"].push_back(
        {{"name", p.name},
         {"uid", p.uid},
         {"declared_permissions", array_of(p.declared_permissions)},
         {"legacy_storage", p.legacy_storage},
         {"uses_file_provider", p.uses_file_provider}});
  }

  doc["permission_group_map"] = ojson::object();
  for (const auto& [perm, gids] : s.permission_group_map) {
    doc["permission_group_map"][perm] = array_of(gids);
  }

  doc["privilege_map"] = ojson::array();
  for (const auto& m : s.privilege_map) {
    doc["privilege_map"].push_back(
        {{"pattern", m.pattern}, {"level", to_string(m.level)}});
  }

  doc["user_consents"] = ojson::array();
  for (const auto& c : s.user_consents) {
    ojson access = ojson::array();
    if (c.access & consent_access::kRead) access.push_back("read");
    if (c.access & consent_access::kWrite) access.push_back("write");
    doc["user_consents"].push_back(
        {{"package", c.package}, {"path", c.path}, {"access", access}});
  }

  return doc.dump(2) + "\n";
}

}  // namespace polyscope
