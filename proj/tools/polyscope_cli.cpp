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

// polyscope: command-line front end over the C API.
//
// Exit codes: 0 success, 1 usage or I/O failure (and refused operations),
// 2 invalid snapshot, 3 engine/oracle mismatch.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "CLI11.hpp"
#include "polyscope/polyscope.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitMismatch = 3;

struct SnapshotDeleter {
  void operator()(ps_snapshot* s) const { ps_snapshot_free(s); }
};
struct ResultDeleter {
  void operator()(ps_result* r) const { ps_result_free(r); }
};
struct ReportDeleter {
  void operator()(ps_report* r) const { ps_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { ps_string_free(s); }
};
using SnapshotPtr = std::unique_ptr<ps_snapshot, SnapshotDeleter>;
using ResultPtr = std::unique_ptr<ps_result, ResultDeleter>;
using ReportPtr = std::unique_ptr<ps_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

void complain(const std::string& what) {
  std::cerr << "polyscope: " << what << ": " << ps_last_error() << "\n";
}

// Loads a snapshot; on failure returns the exit code to use.
std::optional<int> load(const std::string& path, SnapshotPtr& out) {
  ps_snapshot* raw = nullptr;
  const ps_status st = ps_snapshot_load(path.c_str(), &raw);
  out.reset(raw);
  if (st == PS_OK) return std::nullopt;
  if (st == PS_ERR_IO) {
    complain("cannot load snapshot");
    return kExitFailure;
  }
  // Malformed documents are reported like validation errors.
  std::cout << "ERROR " << ps_status_name(st) << " " << path << ": "
            << ps_last_error() << "\n";
  return kExitInvalid;
}

bool write_output(const std::string& out_path, const char* text) {
  if (out_path.empty()) {
    std::fputs(text, stdout);
    return std::fflush(stdout) == 0;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) return false;
  f << text;
  f.close();
  return static_cast<bool>(f);
}

struct AnalyzeArgs {
  std::string snapshot;
  std::size_t workers = 1;
  bool external_only = false;
  bool no_adversary_expansion = false;
  bool no_victim_expansion = false;
  bool what_if = false;
  bool oracle = false;
  std::string format = "json";
  std::string out;
  bool no_timing = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
  SnapshotPtr snap;
  if (auto code = load(a.snapshot, snap)) return *code;

  char* findings_raw = nullptr;
  std::size_t errors = 0;
  if (ps_snapshot_validate(snap.get(), &findings_raw, &errors, nullptr) != PS_OK) {
    complain("validation failed");
    return kExitFailure;
  }
  StringPtr findings(findings_raw);
  if (errors > 0) {
    std::cerr << findings.get();
    return kExitInvalid;
  }

  ps_engine_config cfg;
  ps_engine_config_init(&cfg);
  cfg.worker_count = a.workers;
  cfg.adversary_expansion = a.no_adversary_expansion ? 0 : 1;
  cfg.victim_expansion = a.no_victim_expansion ? 0 : 1;
  cfg.external_only = a.external_only ? 1 : 0;

  auto run = [&](const ps_snapshot* s, ResultPtr& out) {
    ps_result* raw = nullptr;
    const ps_status st = ps_analyze(s, &cfg, &raw);
    out.reset(raw);
    return st;
  };

  ResultPtr result;
  if (ps_status st = run(snap.get(), result); st != PS_OK) {
    complain("analysis failed");
    return st == PS_ERR_INVALID_SNAPSHOT ? kExitInvalid : kExitFailure;
  }

  if (a.oracle) {
    ps_result* raw = nullptr;
    const ps_status st = ps_oracle_analyze(snap.get(), &cfg, 1, &raw);
    ResultPtr reference(raw);
    if (st != PS_OK) {
      complain("oracle failed");
      return kExitFailure;
    }
    if (!ps_result_equal(result.get(), reference.get())) {
      ps_counts e{}, o{};
      ps_result_counts(result.get(), &e);
      ps_result_counts(reference.get(), &o);
      std::cerr << "polyscope: engine and oracle disagree (engine " << e.ivs
                << " IVs, " << e.ops << " ops, " << e.squat_prevented
                << " prevented; oracle " << o.ivs << " IVs, " << o.ops
                << " ops, " << o.squat_prevented << " prevented)\n";
      return kExitMismatch;
    }
  }

  ps_report* report_raw = nullptr;
  if (ps_report_build(result.get(), snap.get(), a.no_timing ? 0 : 1,
                      &report_raw) != PS_OK) {
    complain("report failed");
    return kExitFailure;
  }
  ReportPtr report(report_raw);

  if (a.what_if) {
    ps_snapshot* transformed_raw = nullptr;
    if (ps_what_if_full_scoped(snap.get(), &transformed_raw) != PS_OK) {
      complain("what-if analysis refused");
      return kExitFailure;
    }
    SnapshotPtr transformed(transformed_raw);
    ResultPtr after;
    if (run(transformed.get(), after) != PS_OK) {
      complain("what-if analysis failed");
      return kExitFailure;
    }
    if (ps_report_attach_what_if(report.get(), result.get(), after.get()) !=
        PS_OK) {
      complain("what-if analysis failed");
      return kExitFailure;
    }
  }

  ps_format format = PS_FORMAT_JSON;
  if (a.format == "csv") format = PS_FORMAT_CSV;
  if (a.format == "table") format = PS_FORMAT_TABLE;
  char* text_raw = nullptr;
  if (ps_report_render(report.get(), format, &text_raw) != PS_OK) {
    complain("rendering failed");
    return kExitFailure;
  }
  StringPtr text(text_raw);
  if (!write_output(a.out, text.get())) {
    std::cerr << "polyscope: cannot write " << (a.out.empty() ? "output" : a.out)
              << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  SnapshotPtr snap;
  if (auto code = load(path, snap)) return *code;
  char* findings_raw = nullptr;
  std::size_t errors = 0;
  if (ps_snapshot_validate(snap.get(), &findings_raw, &errors, nullptr) != PS_OK) {
    complain("validation failed");
    return kExitFailure;
  }
  StringPtr findings(findings_raw);
  std::fputs(findings.get(), stdout);
  return errors > 0 ? kExitInvalid : kExitOk;
}

struct GenArgs {
  std::uint64_t seed = 1;
  std::size_t subjects = 0;
  std::size_t objects = 0;
  double legacy = 0.2;
  bool pre_scoped = false;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  ps_gen_params p;
  ps_gen_params_init(&p);
  p.seed = a.seed;
  p.subject_count = a.subjects;
  p.object_count = a.objects;
  p.legacy_fraction = a.legacy;
  p.scoped_storage_enabled = a.pre_scoped ? 0 : 1;

  ps_snapshot* raw = nullptr;
  if (ps_generate(&p, &raw) != PS_OK) {
    complain("generation failed");
    return kExitFailure;
  }
  SnapshotPtr snap(raw);
  char* text_raw = nullptr;
  if (ps_snapshot_to_json(snap.get(), &text_raw) != PS_OK) {
    complain("serialization failed");
    return kExitFailure;
  }
  StringPtr text(text_raw);
  if (!write_output(a.out, text.get())) {
    std::cerr << "polyscope: cannot write " << a.out << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-policy Android access-control triage"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Compute IVs and attack operations");
  analyze->add_option("snapshot", aa.snapshot, "Snapshot JSON")->required();
  auto* workers = analyze
                      ->add_option("--workers", aa.workers,
                                   "Worker threads (fallback: POLYSCOPE_WORKERS)")
                      ->check(CLI::PositiveNumber);
  analyze->add_flag("--external-only", aa.external_only,
                    "Only analyze objects on external storage");
  analyze->add_flag("--no-adversary-expansion", aa.no_adversary_expansion);
  analyze->add_flag("--no-victim-expansion", aa.no_victim_expansion);
  analyze->add_flag("--what-if-full-scoped", aa.what_if,
                    "Add the fully-enforced Scoped Storage comparison");
  analyze->add_flag("--oracle", aa.oracle, "Cross-check against the oracle");
  analyze->add_option("--format", aa.format)
      ->check(CLI::IsMember({"json", "csv", "table"}));
  analyze->add_option("--out", aa.out, "Output file (default stdout)");
  analyze->add_flag("--no-timing", aa.no_timing, "Omit timing from the report");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a snapshot");
  validate->add_option("snapshot", validate_path, "Snapshot JSON")->required();

  GenArgs ga;
  bool scoped_flag = false;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic snapshot");
  gen->add_option("--seed", ga.seed)->required();
  gen->add_option("--subjects", ga.subjects)->required();
  gen->add_option("--objects", ga.objects)->required();
  gen->add_option("--legacy", ga.legacy)->check(CLI::Range(0.0, 1.0));
  auto* scoped = gen->add_flag("--scoped", scoped_flag, "Scoped Storage on (default)");
  gen->add_flag("--pre-scoped", ga.pre_scoped, "Scoped Storage off")
      ->excludes(scoped);
  gen->add_option("--out", ga.out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFailure;
  }

  if (*analyze) {
    // CLI11 drops environment values that fail validation, so the fallback
    // is parsed here and rejected loudly.
    if (workers->count() == 0) {
      const char* env = std::getenv("POLYSCOPE_WORKERS");
      if (env != nullptr && *env != '\0') {
        const std::string_view text(env);
        std::size_t n = 0;
        const auto [end, ec] =
            std::from_chars(text.data(), text.data() + text.size(), n);
        if (ec != std::errc() || end != text.data() + text.size() || n == 0) {
          std::cerr << "polyscope: POLYSCOPE_WORKERS must be a positive integer\n";
          return kExitFailure;
        }
        aa.workers = n;
      }
    }
    return cmd_analyze(aa);
  }
  if (*validate) return cmd_validate(validate_path);
  return cmd_gen(ga);
}
