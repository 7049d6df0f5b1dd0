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

// Integrity-violation and attack-operation rules, evaluated one object at a
// time.

#ifndef POLYSCOPE_ANALYSIS_HPP
#define POLYSCOPE_ANALYSIS_HPP

#include <compare>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "polyscope/authz.hpp"
#include "polyscope/expansion.hpp"
#include "polyscope/labeling.hpp"
#include "polyscope/snapshot.hpp"

namespace polyscope {

enum class IvKind : std::uint8_t { Read, Write, Exec, Binding, Pathname };

enum class OpKind : std::uint8_t {
  FileMod,
  FileSquat,
  LinkTraversal,
  LuringTraversal
};

std::string_view to_string(IvKind kind);
std::string_view to_string(OpKind kind);

// Member order is the canonical sort order: object, victim, adversary, kind.
struct IntegrityViolation {
  ObjectId object = 0;
  SubjectId victim = 0;
  SubjectId adversary = 0;
  IvKind kind = IvKind::Read;

  auto operator<=>(const IntegrityViolation&) const = default;
};

struct AttackOperation {
  ObjectId object = 0;
  SubjectId victim = 0;
  SubjectId adversary = 0;
  OpKind kind = OpKind::FileMod;
  // Smallest IV kind that produced this operation.
  IvKind source_iv_kind = IvKind::Read;

  auto operator<=>(const AttackOperation&) const = default;
};

// A writable-mount binding IV that could not become a squat because the
// victim would be unable to read an adversary-created file there.
struct SquatPreventedRecord {
  ObjectId object = 0;
  SubjectId victim = 0;
  SubjectId adversary = 0;

  auto operator<=>(const SquatPreventedRecord&) const = default;
};

// Read-only inputs shared by every per-object evaluation.
class AnalysisContext {
 public:
  AnalysisContext(const Snapshot& s, std::span<const Subject> subjects,
                  std::span<const FsObject> objects,
                  const ExpansionConfig& cfg);

  const Snapshot& snapshot() const { return *snapshot_; }
  std::span<const Subject> subjects() const { return subjects_; }
  std::span<const FsObject> objects() const { return objects_; }
  const ExpansionConfig& config() const { return config_; }
  const PolicyIndex& index() const { return index_; }
  // Adversary-expanded (or base, when disabled) context per subject.
  const AccessContext& context(SubjectId s) const { return contexts_[s]; }
  std::span<const AccessContext> contexts() const { return contexts_; }

 private:
  const Snapshot* snapshot_;
  std::span<const Subject> subjects_;
  std::span<const FsObject> objects_;
  ExpansionConfig config_;
  PolicyIndex index_;
  std::vector<AccessContext> contexts_;
};

std::vector<IntegrityViolation> compute_file_ivs(const FsObject& obj,
                                                 const AnalysisContext& ctx);
std::vector<IntegrityViolation> compute_binding_ivs(const FsObject& obj,
                                                    const AnalysisContext& ctx);
std::vector<IntegrityViolation> compute_pathname_ivs(
    const FsObject& obj, const AnalysisContext& ctx);

// Can the victim read a file the adversary creates inside this binding, as far
// as Scoped Storage is concerned?
bool squat_read_gate(const Subject& victim, const AccessContext& victim_ctx,
                     const Subject& adversary, const FsObject& binding,
                     bool scoped_storage_enabled);

struct AttackOps {
  std::vector<AttackOperation> ops;
  std::vector<SquatPreventedRecord> squat_prevented;
};

// All IVs must reference obj.
AttackOps compute_attack_ops(std::span<const IntegrityViolation> ivs,
                             const FsObject& obj, const AnalysisContext& ctx);

struct ObjectFindings {
  std::vector<IntegrityViolation> ivs;
  std::vector<AttackOperation> ops;
  std::vector<SquatPreventedRecord> squat_prevented;
};

// Every rule for one object; each vector sorted canonically. Symlinks yield
// nothing.
ObjectFindings analyze_object(const FsObject& obj, const AnalysisContext& ctx);

}  // namespace polyscope

#endif  // POLYSCOPE_ANALYSIS_HPP
