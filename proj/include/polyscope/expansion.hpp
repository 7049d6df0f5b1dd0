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

// Adversary and victim permission expansion.

#ifndef POLYSCOPE_EXPANSION_HPP
#define POLYSCOPE_EXPANSION_HPP

#include "polyscope/authz.hpp"
#include "polyscope/labeling.hpp"
#include "polyscope/snapshot.hpp"

namespace polyscope {

struct ExpansionConfig {
  bool adversary_expansion = true;
  bool victim_expansion = true;
  // Only consulted for snapshots with Scoped Storage disabled.
  bool prescoped_assume_rex_wex = true;

  bool operator==(const ExpansionConfig&) const = default;
};

// The subject's own groups, nothing assumed.
AccessContext base_context(const Subject& subj);

// Adds the GIDs behind every declared permission and the declared storage
// permissions (WEX is dropped once Scoped Storage is on).
AccessContext expand_adversary(const Subject& subj, const Snapshot& s,
                               const ExpansionConfig& cfg);

// Starts from the victim's adversary-expanded context. Identity for external
// objects under Scoped Storage; otherwise the adversary's own objects become
// mode 0777 for the victim, and on pre-scoped systems REX/WEX are assumed.
AccessContext expand_victim(const AccessContext& victim_ctx,
                            const Subject& adversary, const FsObject& obj,
                            bool scoped_storage_enabled,
                            const ExpansionConfig& cfg);

}  // namespace polyscope

#endif  // POLYSCOPE_EXPANSION_HPP
