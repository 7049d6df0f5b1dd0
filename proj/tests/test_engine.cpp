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

#include <map>

#include "polyscope/engine.hpp"
#include "polyscope/errors.hpp"
#include "polyscope/synthgen.hpp"
#include "test_util.hpp"

namespace polyscope {
namespace {

using testing::base_snapshot;
using testing::load_fixture;

Snapshot generated(std::uint64_t seed, std::size_t subjects, std::size_t objects,
                   bool scoped = true) {
  GenParams p;
  p.seed = seed;
  p.subject_count = subjects;
  p.object_count = objects;
  p.scoped_storage_enabled = scoped;
  return generate(p);
}

EngineConfig with_workers(std::size_t n) {
  EngineConfig cfg;
  cfg.worker_count = n;
  return cfg;
}

TEST(Engine, WorkerCountDoesNotChangeResults) {
  for (bool scoped : {true, false}) {
    const auto s = generated(21, 40, 800, scoped);
    const auto one = analyze(s, with_workers(1));
    EXPECT_FALSE(one.ivs.empty());
    for (std::size_t n : {2u, 8u}) {
      const auto many = analyze(s, with_workers(n));
      EXPECT_EQ(many.ivs, one.ivs);
      EXPECT_EQ(many.ops, one.ops);
      EXPECT_EQ(many.squat_prevented, one.squat_prevented);
      EXPECT_TRUE(many.same_records(one));
      EXPECT_EQ(result_to_json(many, false), result_to_json(one, false));
    }
  }
}

TEST(Engine, StaticScheduleMatchesDynamic) {
  const auto s = generated(22, 30, 500);
  auto cfg = with_workers(4);
  const auto dyn = analyze(s, cfg);
  cfg.schedule = Schedule::StaticBlocks;
  EXPECT_TRUE(analyze(s, cfg).same_records(dyn));
}

TEST(Engine, RecordsAreCanonicallySortedAndUnique) {
  const auto r = analyze(generated(23, 40, 600), with_workers(3));
  EXPECT_TRUE(std::is_sorted(r.ivs.begin(), r.ivs.end()));
  EXPECT_TRUE(std::adjacent_find(r.ivs.begin(), r.ivs.end()) == r.ivs.end());
  EXPECT_TRUE(std::is_sorted(r.ops.begin(), r.ops.end()));
  EXPECT_TRUE(std::is_sorted(r.squat_prevented.begin(), r.squat_prevented.end()));
}

TEST(Engine, ExternalOnlyFilter) {
  const auto s = generated(24, 40, 600);
  const auto all = analyze(s, EngineConfig{});
  EngineConfig cfg;
  cfg.scope_filter = ScopeFilter::ExternalOnly;
  const auto ext = analyze(s, cfg);
  std::vector<IntegrityViolation> expected;
  for (const auto& iv : all.ivs) {
    if (all.objects[iv.object].mount.external_storage) expected.push_back(iv);
  }
  EXPECT_EQ(ext.ivs, expected);
  EXPECT_FALSE(expected.empty());
}

TEST(Engine, InvalidSnapshotIsRefused) {
  EXPECT_THROW(analyze(load_fixture("broken.json"), EngineConfig{}),
               InvalidSnapshotError);
  EXPECT_THROW(analyze_streaming(load_fixture("broken.json"), EngineConfig{},
                                 [](const Record&) { return true; }),
               InvalidSnapshotError);
}

TEST(Engine, ZeroWorkersIsAValueError) {
  EXPECT_THROW(analyze(load_fixture("f1.json"), with_workers(0)), ValueError);
}

TEST(Engine, EmptySnapshot) {
  const auto r = analyze(base_snapshot(), with_workers(4));
  EXPECT_TRUE(r.ivs.empty());
  EXPECT_TRUE(r.ops.empty());
  EXPECT_TRUE(r.subjects.empty());
  EXPECT_TRUE(r.objects.empty());
}

TEST(Engine, TimingIsPopulated) {
  const auto r = analyze(generated(25, 20, 200), EngineConfig{});
  EXPECT_GE(r.timing.labeling_ms, 0.0);
  EXPECT_GE(r.timing.workers_ms, 0.0);
  EXPECT_GE(r.timing.merge_ms, 0.0);
}

struct Collected {
  std::vector<IntegrityViolation> ivs;
  std::vector<AttackOperation> ops;
  std::vector<SquatPreventedRecord> prevented;

  bool add(const Record& rec) {
    if (const auto* iv = std::get_if<IntegrityViolation>(&rec)) ivs.push_back(*iv);
    if (const auto* op = std::get_if<AttackOperation>(&rec)) ops.push_back(*op);
    if (const auto* sp = std::get_if<SquatPreventedRecord>(&rec)) {
      prevented.push_back(*sp);
    }
    return true;
  }
};

TEST(Streaming, SameRecordsAsBatch) {
  const auto s = generated(26, 40, 800);
  const auto batch = analyze(s, with_workers(1));
  for (std::size_t n : {1u, 4u}) {
    Collected c;
    const auto summary = analyze_streaming(
        s, with_workers(n), [&](const Record& rec) { return c.add(rec); });
    EXPECT_TRUE(summary.complete);
    EXPECT_EQ(summary.iv_count, batch.ivs.size());
    EXPECT_EQ(summary.op_count, batch.ops.size());
    EXPECT_EQ(summary.squat_prevented_count, batch.squat_prevented.size());
    std::sort(c.ivs.begin(), c.ivs.end());
    std::sort(c.ops.begin(), c.ops.end());
    std::sort(c.prevented.begin(), c.prevented.end());
    EXPECT_EQ(c.ivs, batch.ivs);
    EXPECT_EQ(c.ops, batch.ops);
    EXPECT_EQ(c.prevented, batch.squat_prevented);
  }
}

TEST(Streaming, RecordsOfOneObjectArriveTogether) {
  const auto s = generated(27, 30, 400);
  std::vector<ObjectId> order;
  analyze_streaming(s, with_workers(4), [&](const Record& rec) {
    const ObjectId o = std::visit([](const auto& x) { return x.object; }, rec);
    if (order.empty() || order.back() != o) order.push_back(o);
    return true;
  });
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_TRUE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST(Streaming, SinkCanAbort) {
  const auto s = generated(28, 40, 800);
  std::size_t seen = 0;
  const auto summary = analyze_streaming(s, with_workers(4), [&](const Record&) {
    return ++seen < 5;
  });
  EXPECT_FALSE(summary.complete);
  EXPECT_EQ(seen, 5u);
  EXPECT_LE(summary.iv_count + summary.op_count + summary.squat_prevented_count, 5u);
}

TEST(Streaming, LargeRunCountsMatchBatch) {
  const auto s = generated(29, 120, 12000);
  std::size_t n = 0;
  const auto summary = analyze_streaming(s, with_workers(2), [&](const Record&) {
    ++n;
    return true;
  });
  const auto batch = analyze(s, with_workers(2));
  EXPECT_EQ(n, batch.ivs.size() + batch.ops.size() + batch.squat_prevented.size());
  EXPECT_EQ(summary.iv_count, batch.ivs.size());
}

TEST(ResultJson, CanonicalAndTimingOptional) {
  const auto r = analyze(load_fixture("f1.json"), EngineConfig{});
  const auto without = result_to_json(r, false);
  EXPECT_EQ(without.find("timing"), std::string::npos);
  EXPECT_NE(result_to_json(r, true).find("timing"), std::string::npos);
  EXPECT_NE(without.find("/sdcard/oem_log/ota.zip"), std::string::npos);
  EXPECT_EQ(without, result_to_json(analyze(load_fixture("f1.json"), with_workers(3)),
                                    false));
}

}  // namespace
}  // namespace polyscope
