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

#include "polyscope/expansion.hpp"

#include <set>

namespace polyscope {

AccessContext base_context(const Subject& subj) {
  AccessContext ctx;
  ctx.effective_groups = subj.groups;
  return ctx;
}

AccessContext expand_adversary(const Subject& subj, const Snapshot& s,
                               const ExpansionConfig& cfg) {
  AccessContext ctx = base_context(subj);
  if (!cfg.adversary_expansion) return ctx;

  std::set<Gid> groups(subj.groups.begin(), subj.groups.end());
  for (const auto& perm : subj.declared_permissions) {
    auto it = s.permission_group_map.find(perm);
    if (it != s.permission_group_map.end()) {
      groups.insert(it->second.begin(), it->second.end());
    }
  }
  ctx.effective_groups.assign(groups.begin(), groups.end());

  StoragePerms assumed;
  for (const auto& perm : subj.declared_permissions) {
    if (perm == kPermReadExternalStorage) assumed.bits |= StoragePerms::kRex;
    if (perm == kPermManageExternalStorage) assumed.bits |= StoragePerms::kMes;
    // WEX is deprecated under Scoped Storage.
    if (perm == kPermWriteExternalStorage && !s.meta.scoped_storage_enabled) {
      assumed.bits |= StoragePerms::kWex;
    }
  }
  ctx.assumed_storage_perms = assumed;
  return ctx;
}

AccessContext expand_victim(const AccessContext& victim_ctx,
                            const Subject& adversary, const FsObject& obj,
                            bool scoped_storage_enabled,
                            const ExpansionConfig& cfg) {
  AccessContext ctx = victim_ctx;
  if (!cfg.victim_expansion) return ctx;
  if (obj.mount.external_storage && scoped_storage_enabled) return ctx;

  ctx.dac_override_owner = adversary.uid;
  if (cfg.prescoped_assume_rex_wex && !scoped_storage_enabled) {
    ctx.assumed_storage_perms.bits |= StoragePerms::kRex | StoragePerms::kWex;
  }
  return ctx;
}

}  // namespace polyscope
