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

#include "polyscope/engine.hpp"
#include "polyscope/errors.hpp"
#include "polyscope/oracle.hpp"
#include "polyscope/synthgen.hpp"
#include "test_util.hpp"

namespace polyscope {
namespace {

using testing::base_snapshot;
using testing::load_fixture;

void expect_agreement(const Snapshot& s, const EngineConfig& cfg = {}) {
  const auto fast = analyze(s, cfg);
  const auto slow = oracle_analyze(s, cfg);
  EXPECT_EQ(fast.ivs, slow.ivs);
  EXPECT_EQ(fast.ops, slow.ops);
  EXPECT_EQ(fast.squat_prevented, slow.squat_prevented);
  EXPECT_TRUE(fast.same_records(slow));
}

TEST(Oracle, Fixtures) {
  for (const char* name : {"f1.json", "f1_pre.json", "squat.json"}) {
    SCOPED_TRACE(name);
    expect_agreement(load_fixture(name));
  }
}

TEST(Oracle, FixturesWithSymlinks) {
  auto s = load_fixture("f1.json");
  for (auto& m : s.mounts) m.symlinks_allowed = true;
  expect_agreement(s);
}

TEST(Oracle, EmptySnapshot) {
  const auto r = oracle_analyze(base_snapshot(), EngineConfig{});
  EXPECT_TRUE(r.ivs.empty());
  EXPECT_TRUE(r.ops.empty());
}

TEST(Oracle, GeneratedSeeds) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (bool scoped : {true, false}) {
      GenParams p;
      p.seed = seed;
      p.subject_count = 30;
      p.object_count = 300;
      p.scoped_storage_enabled = scoped;
      SCOPED_TRACE(seed);
      expect_agreement(generate(p));
    }
  }
}

TEST(Oracle, ConfigurationsAgree) {
  GenParams p;
  p.seed = 9;
  p.subject_count = 30;
  p.object_count = 300;
  p.scoped_storage_enabled = false;
  const auto s = generate(p);
  EngineConfig cfg;
  cfg.scope_filter = ScopeFilter::ExternalOnly;
  expect_agreement(s, cfg);
  cfg = {};
  cfg.expansion.victim_expansion = false;
  expect_agreement(s, cfg);
  cfg = {};
  cfg.expansion.adversary_expansion = false;
  cfg.expansion.prescoped_assume_rex_wex = false;
  expect_agreement(s, cfg);
}

TEST(Oracle, SizeGuard) {
  GenParams p;
  p.seed = 1;
  p.subject_count = 101;
  p.object_count = 10;
  EXPECT_THROW(oracle_analyze(generate(p), EngineConfig{}), SizeGuardError);
  p.subject_count = 10;
  p.object_count = 1001;
  EXPECT_THROW(oracle_analyze(generate(p), EngineConfig{}), SizeGuardError);
  OracleLimits loose;
  loose.enforce = false;
  EXPECT_NO_THROW(oracle_analyze(generate(p), EngineConfig{}, loose));
}

TEST(Oracle, RefusesInvalidSnapshots) {
  EXPECT_THROW(oracle_analyze(load_fixture("broken.json"), EngineConfig{}),
               InvalidSnapshotError);
}

}  // namespace
}  // namespace polyscope
