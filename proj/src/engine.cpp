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

#include "polyscope/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "polyscope/errors.hpp"

namespace polyscope {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// Runs fn(position) for every position in [0, count) on up to
// cfg.worker_count threads. Dynamic scheduling hands positions out one at a
// time; static scheduling gives each thread one contiguous block.
template <class Fn>
void run_workers(std::size_t count, const EngineConfig& cfg,
                 const std::atomic<bool>& stop, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(
      1, std::min(cfg.worker_count, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::atomic<bool> failed{false};

  auto body = [&](std::size_t worker) {
    try {
      if (cfg.schedule == Schedule::StaticBlocks) {
        const std::size_t lo = worker * count / workers;
        const std::size_t hi = (worker + 1) * count / workers;
        for (std::size_t pos = lo; pos < hi; ++pos) {
          if (stop.load(std::memory_order_relaxed) ||
              failed.load(std::memory_order_relaxed)) {
            return;
          }
          fn(pos);
        }
        return;
      }
      for (;;) {
        if (stop.load(std::memory_order_relaxed) ||
            failed.load(std::memory_order_relaxed)) {
          return;
        }
        const std::size_t pos = next.fetch_add(1, std::memory_order_relaxed);
        if (pos >= count) return;
        fn(pos);
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      failed = true;
    }
  };

  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }
  if (failure) std::rethrow_exception(failure);
}

void require_valid(const Snapshot& s, const EngineConfig& cfg) {
  if (cfg.worker_count < 1) {
    throw ValueError("worker_count", "must be at least 1");
  }
  const auto report = validate_snapshot(s);
  if (!report.has_errors()) return;
  std::string msg = "snapshot has " + std::to_string(report.error_count()) +
                    " validation error(s)";
  for (const auto& f : report.findings) {
    if (f.severity == Severity::Error) {
      msg += "; first: " + format_finding(f);
      break;
    }
  }
  throw InvalidSnapshotError(msg);
}

struct Prepared {
  std::vector<Subject> subjects;
  std::vector<FsObject> objects;
  std::vector<ObjectId> work;
  double labeling_ms = 0;
};

Prepared prepare(const Snapshot& s, const EngineConfig& cfg) {
  const auto start = Clock::now();
  Prepared p;
  p.subjects = build_subjects(s);
  p.objects = build_objects(s, p.subjects);
  for (const auto& obj : p.objects) {
    if (cfg.scope_filter == ScopeFilter::ExternalOnly &&
        !obj.mount.external_storage) {
      continue;
    }
    p.work.push_back(obj.id);
  }
  p.labeling_ms = ms_since(start);
  return p;
}

}  // namespace

bool AnalysisResult::same_records(const AnalysisResult& other) const {
  return ivs == other.ivs && ops == other.ops &&
         squat_prevented == other.squat_prevented;
}

AnalysisResult analyze(const Snapshot& s, const EngineConfig& cfg) {
  require_valid(s, cfg);
  Prepared p = prepare(s, cfg);

  AnalysisResult result;
  result.timing.labeling_ms = p.labeling_ms;

  auto start = Clock::now();
  const AnalysisContext ctx(s, p.subjects, p.objects, cfg.expansion);
  result.timing.expansion_ms = ms_since(start);

  start = Clock::now();
  std::vector<ObjectFindings> slots(p.work.size());
  const std::atomic<bool> never{false};
  run_workers(p.work.size(), cfg, never, [&](std::size_t pos) {
    slots[pos] = analyze_object(p.objects[p.work[pos]], ctx);
  });
  result.timing.workers_ms = ms_since(start);

  // Work is in object-id order and each slot is already sorted, so
  // concatenation yields the canonical order.
  start = Clock::now();
  std::size_t n_ivs = 0, n_ops = 0, n_prevented = 0;
  for (const auto& f : slots) {
    n_ivs += f.ivs.size();
    n_ops += f.ops.size();
    n_prevented += f.squat_prevented.size();
  }
  result.ivs.reserve(n_ivs);
  result.ops.reserve(n_ops);
  result.squat_prevented.reserve(n_prevented);
  for (auto& f : slots) {
    result.ivs.insert(result.ivs.end(), f.ivs.begin(), f.ivs.end());
    result.ops.insert(result.ops.end(), f.ops.begin(), f.ops.end());
    result.squat_prevented.insert(result.squat_prevented.end(),
                                  f.squat_prevented.begin(),
                                  f.squat_prevented.end());
    f = ObjectFindings{};
  }
  result.subjects = std::move(p.subjects);
  result.objects = std::move(p.objects);
  result.timing.merge_ms = ms_since(start);
  return result;
}

StreamSummary analyze_streaming(const Snapshot& s, const EngineConfig& cfg,
                                const RecordSink& sink) {
  require_valid(s, cfg);
  Prepared p = prepare(s, cfg);
  const AnalysisContext ctx(s, p.subjects, p.objects, cfg.expansion);

  StreamSummary summary;
  std::mutex sink_mu;
  std::atomic<bool> stop{false};

  run_workers(p.work.size(), cfg, stop, [&](std::size_t pos) {
    const ObjectFindings f = analyze_object(p.objects[p.work[pos]], ctx);
    if (f.ivs.empty() && f.ops.empty() && f.squat_prevented.empty()) return;

    std::lock_guard lock(sink_mu);
    if (stop.load()) return;
    auto feed = [&](const Record& r, std::size_t& counter) {
      bool ok = false;
      try {
        ok = sink(r);
      } catch (...) {
        ok = false;
      }
      if (ok) {
        ++counter;
      } else {
        summary.complete = false;
        stop = true;
      }
      return ok;
    };
    for (const auto& iv : f.ivs) {
      if (!feed(iv, summary.iv_count)) return;
    }
    for (const auto& op : f.ops) {
      if (!feed(op, summary.op_count)) return;
    }
    for (const auto& sp : f.squat_prevented) {
      if (!feed(sp, summary.squat_prevented_count)) return;
    }
  });
  return summary;
}

}  // namespace polyscope
