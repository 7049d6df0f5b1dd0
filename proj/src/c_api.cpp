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

#include "polyscope/polyscope.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "polyscope/engine.hpp"
#include "polyscope/errors.hpp"
#include "polyscope/oracle.hpp"
#include "polyscope/report.hpp"
#include "polyscope/snapshot.hpp"
#include "polyscope/synthgen.hpp"

struct ps_snapshot {
  polyscope::Snapshot value;
};

struct ps_result {
  polyscope::AnalysisResult value;
};

struct ps_report {
  polyscope::TriageReport value;
};

namespace {

thread_local std::string g_last_error;

ps_status fail(ps_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn and maps exceptions onto status codes.
template <class Fn>
ps_status guarded(Fn&& fn) {
  using namespace polyscope;
  try {
    g_last_error.clear();
    return fn();
  } catch (const IoError& e) {
    return fail(PS_ERR_IO, e.what());
  } catch (const SyntaxError& e) {
    return fail(PS_ERR_SYNTAX, e.what());
  } catch (const SchemaError& e) {
    return fail(PS_ERR_SCHEMA, e.what());
  } catch (const ValueError& e) {
    return fail(PS_ERR_VALUE, e.what());
  } catch (const InvalidSnapshotError& e) {
    return fail(PS_ERR_INVALID_SNAPSHOT, e.what());
  } catch (const NoMountError& e) {
    return fail(PS_ERR_INVALID_SNAPSHOT, e.what());
  } catch (const NotApplicableError& e) {
    return fail(PS_ERR_NOT_APPLICABLE, e.what());
  } catch (const SizeGuardError& e) {
    return fail(PS_ERR_SIZE_GUARD, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PS_ERR_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

polyscope::EngineConfig to_engine(const ps_engine_config* cfg) {
  polyscope::EngineConfig out;
  if (cfg == nullptr) return out;
  out.worker_count = cfg->worker_count;
  out.expansion.adversary_expansion = cfg->adversary_expansion != 0;
  out.expansion.victim_expansion = cfg->victim_expansion != 0;
  out.expansion.prescoped_assume_rex_wex = cfg->prescoped_assume_rex_wex != 0;
  out.scope_filter = cfg->external_only != 0 ? polyscope::ScopeFilter::ExternalOnly
                                             : polyscope::ScopeFilter::All;
  out.schedule = cfg->static_schedule != 0 ? polyscope::Schedule::StaticBlocks
                                           : polyscope::Schedule::Dynamic;
  return out;
}

#define PS_REQUIRE(cond, what) \
  if (!(cond)) return fail(PS_ERR_ARGUMENT, what)

}  // namespace

extern "C" {

const char* ps_last_error(void) { return g_last_error.c_str(); }

const char* ps_status_name(ps_status status) {
  switch (status) {
    case PS_OK: return "ok";
    case PS_ERR_IO: return "io";
    case PS_ERR_SYNTAX: return "syntax";
    case PS_ERR_SCHEMA: return "schema";
    case PS_ERR_VALUE: return "value";
    case PS_ERR_INVALID_SNAPSHOT: return "invalid_snapshot";
    case PS_ERR_NOT_APPLICABLE: return "not_applicable";
    case PS_ERR_SIZE_GUARD: return "size_guard";
    case PS_ERR_SINK_ABORTED: return "sink_aborted";
    case PS_ERR_ARGUMENT: return "argument";
    case PS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* ps_version(void) { return "1.0.0"; }

void ps_string_free(char* s) { std::free(s); }

ps_status ps_snapshot_load(const char* path, ps_snapshot** out) {
  PS_REQUIRE(path != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ps_snapshot{polyscope::load_snapshot_file(path)};
    return PS_OK;
  });
}

ps_status ps_snapshot_parse(const char* json, size_t len, ps_snapshot** out) {
  PS_REQUIRE(json != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ps_snapshot{polyscope::parse_snapshot(std::string_view(json, len))};
    return PS_OK;
  });
}

void ps_snapshot_free(ps_snapshot* s) { delete s; }

ps_status ps_snapshot_to_json(const ps_snapshot* s, char** out) {
  PS_REQUIRE(s != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(polyscope::serialize_snapshot(s->value));
    return PS_OK;
  });
}

int ps_snapshot_equal(const ps_snapshot* a, const ps_snapshot* b) {
  if (a == nullptr || b == nullptr) return a == b;
  return a->value == b->value;
}

ps_status ps_snapshot_validate(const ps_snapshot* s, char** findings,
                               size_t* error_count, size_t* warning_count) {
  PS_REQUIRE(s != nullptr, "null snapshot");
  return guarded([&] {
    const auto report = polyscope::validate_snapshot(s->value);
    if (findings != nullptr) {
      std::string text;
      for (const auto& f : report.findings) {
        text += polyscope::format_finding(f);
        text += '\n';
      }
      *findings = dup_string(text);
    }
    if (error_count != nullptr) *error_count = report.error_count();
    if (warning_count != nullptr) *warning_count = report.warning_count();
    return PS_OK;
  });
}

size_t ps_snapshot_legacy_package_count(const ps_snapshot* s) {
  if (s == nullptr) return 0;
  size_t n = 0;
  for (const auto& p : s->value.packages) n += p.legacy_storage ? 1 : 0;
  return n;
}

size_t ps_snapshot_legacy_root_count(const ps_snapshot* s) {
  if (s == nullptr) return 0;
  size_t n = 0;
  for (const auto& e : s->value.filesystem) {
    n += e.scoped && e.scoped->visibility == polyscope::Visibility::LegacyRoot;
  }
  return n;
}

void ps_engine_config_init(ps_engine_config* cfg) {
  if (cfg == nullptr) return;
  cfg->worker_count = 1;
  cfg->adversary_expansion = 1;
  cfg->victim_expansion = 1;
  cfg->prescoped_assume_rex_wex = 1;
  cfg->external_only = 0;
  cfg->static_schedule = 0;
}

ps_status ps_analyze(const ps_snapshot* s, const ps_engine_config* cfg,
                     ps_result** out) {
  PS_REQUIRE(s != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ps_result{polyscope::analyze(s->value, to_engine(cfg))};
    return PS_OK;
  });
}

ps_status ps_oracle_analyze(const ps_snapshot* s, const ps_engine_config* cfg,
                            int enforce_size_guard, ps_result** out) {
  PS_REQUIRE(s != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    polyscope::OracleLimits limits;
    limits.enforce = enforce_size_guard != 0;
    *out = new ps_result{
        polyscope::oracle_analyze(s->value, to_engine(cfg), limits)};
    return PS_OK;
  });
}

void ps_result_free(ps_result* r) { delete r; }

int ps_result_equal(const ps_result* a, const ps_result* b) {
  if (a == nullptr || b == nullptr) return a == b;
  return a->value.same_records(b->value);
}

ps_status ps_result_to_json(const ps_result* r, int include_timing, char** out) {
  PS_REQUIRE(r != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(polyscope::result_to_json(r->value, include_timing != 0));
    return PS_OK;
  });
}

void ps_result_counts(const ps_result* r, ps_counts* out) {
  if (r == nullptr || out == nullptr) return;
  out->ivs = r->value.ivs.size();
  out->ops = r->value.ops.size();
  out->squat_prevented = r->value.squat_prevented.size();
  out->subjects = r->value.subjects.size();
  out->objects = r->value.objects.size();
}

ps_status ps_analyze_streaming(const ps_snapshot* s, const ps_engine_config* cfg,
                               ps_record_sink sink, void* user,
                               ps_counts* delivered) {
  PS_REQUIRE(s != nullptr && sink != nullptr, "null argument");
  return guarded([&] {
    using namespace polyscope;
    const auto summary = analyze_streaming(
        s->value, to_engine(cfg), [&](const Record& rec) {
          ps_record out{};
          std::string_view kind;
          if (const auto* iv = std::get_if<IntegrityViolation>(&rec)) {
            out = {PS_RECORD_IV, nullptr, iv->object, iv->victim, iv->adversary};
            kind = to_string(iv->kind);
          } else if (const auto* op = std::get_if<AttackOperation>(&rec)) {
            out = {PS_RECORD_OP, nullptr, op->object, op->victim, op->adversary};
            kind = to_string(op->kind);
          } else {
            const auto& sp = std::get<SquatPreventedRecord>(rec);
            out = {PS_RECORD_SQUAT_PREVENTED, nullptr, sp.object, sp.victim,
                   sp.adversary};
            kind = to_string(OpKind::FileSquat);
          }
          // The to_string tables hold string literals, so data() is
          // terminated.
          out.kind = kind.data();
          return sink(&out, user) != 0;
        });
    if (delivered != nullptr) {
      delivered->ivs = summary.iv_count;
      delivered->ops = summary.op_count;
      delivered->squat_prevented = summary.squat_prevented_count;
      delivered->subjects = s->value.subjects.size();
      delivered->objects = s->value.filesystem.size();
    }
    if (!summary.complete) {
      return fail(PS_ERR_SINK_ABORTED, "record sink stopped the analysis");
    }
    return PS_OK;
  });
}

ps_status ps_report_build(const ps_result* r, const ps_snapshot* s,
                          int include_timing, ps_report** out) {
  PS_REQUIRE(r != nullptr && s != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto report = polyscope::summarize(r->value, s->value);
    if (include_timing == 0) report.timing.reset();
    *out = new ps_report{std::move(report)};
    return PS_OK;
  });
}

ps_status ps_report_attach_what_if(ps_report* report, const ps_result* before,
                                   const ps_result* after) {
  PS_REQUIRE(report != nullptr && before != nullptr && after != nullptr,
             "null argument");
  return guarded([&] {
    report->value.what_if = polyscope::what_if_delta(before->value, after->value);
    return PS_OK;
  });
}

ps_status ps_report_render(const ps_report* report, ps_format format,
                           char** out) {
  PS_REQUIRE(report != nullptr && out != nullptr, "null argument");
  polyscope::ReportFormat f;
  switch (format) {
    case PS_FORMAT_JSON: f = polyscope::ReportFormat::Json; break;
    case PS_FORMAT_CSV: f = polyscope::ReportFormat::Csv; break;
    case PS_FORMAT_TABLE: f = polyscope::ReportFormat::Table; break;
    default: return fail(PS_ERR_ARGUMENT, "unknown report format");
  }
  return guarded([&] {
    *out = dup_string(polyscope::render(report->value, f));
    return PS_OK;
  });
}

ps_status ps_report_parse(const char* json, size_t len, ps_report** out) {
  PS_REQUIRE(json != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ps_report{
        polyscope::report_from_json(std::string_view(json, len))};
    return PS_OK;
  });
}

int ps_report_equal(const ps_report* a, const ps_report* b) {
  if (a == nullptr || b == nullptr) return a == b;
  return a->value == b->value;
}

void ps_report_free(ps_report* report) { delete report; }

ps_status ps_what_if_full_scoped(const ps_snapshot* s, ps_snapshot** out) {
  PS_REQUIRE(s != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new ps_snapshot{polyscope::what_if_full_scoped(s->value)};
    return PS_OK;
  });
}

ps_status ps_format_share(uint64_t part, uint64_t whole, char** out) {
  PS_REQUIRE(out != nullptr, "null argument");
  return guarded([&] {
    *out = dup_string(polyscope::format_share(part, whole));
    return PS_OK;
  });
}

void ps_gen_params_init(ps_gen_params* p) {
  if (p == nullptr) return;
  const polyscope::GenParams d;
  p->seed = d.seed;
  p->subject_count = d.subject_count;
  p->object_count = d.object_count;
  p->legacy_fraction = d.legacy_fraction;
  p->external_fraction = d.external_fraction;
  p->scoped_storage_enabled = d.scoped_storage_enabled ? 1 : 0;
  p->skew = d.skew;
}

ps_status ps_generate(const ps_gen_params* p, ps_snapshot** out) {
  PS_REQUIRE(p != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    polyscope::GenParams g;
    g.seed = p->seed;
    g.subject_count = p->subject_count;
    g.object_count = p->object_count;
    g.legacy_fraction = p->legacy_fraction;
    g.external_fraction = p->external_fraction;
    g.scoped_storage_enabled = p->scoped_storage_enabled != 0;
    g.skew = p->skew;
    *out = new ps_snapshot{polyscope::generate(g)};
    return PS_OK;
  });
}

}  // extern "C"
