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

// Deliberately naive reference implementation of the full rule pipeline,
// used to cross-check the engine on small snapshots. It shares only the data
// types with the engine; every predicate is re-derived here.

#ifndef POLYSCOPE_ORACLE_HPP
#define POLYSCOPE_ORACLE_HPP

#include <cstddef>

#include "polyscope/engine.hpp"
#include "polyscope/snapshot.hpp"

namespace polyscope {

struct OracleLimits {
  std::size_t max_subjects = 100;
  std::size_t max_objects = 1000;
  bool enforce = true;
};

// Throws SizeGuardError when the snapshot exceeds the limits.
AnalysisResult oracle_analyze(const Snapshot& s, const EngineConfig& cfg,
                              const OracleLimits& limits = {});

}  // namespace polyscope

#endif  // POLYSCOPE_ORACLE_HPP
