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

#ifndef POLYSCOPE_ERRORS_HPP
#define POLYSCOPE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polyscope {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed document. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Missing, unknown or mistyped field. `field` is a JSON-pointer-like location.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Well-typed but invalid value (bad enum, negative uid, mode out of range).
class ValueError : public Error {
 public:
  ValueError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class NoMountError : public Error {
 public:
  using Error::Error;
};

// Analysis refused because the snapshot has error-severity findings.
class InvalidSnapshotError : public Error {
 public:
  using Error::Error;
};

// Operation only defined for snapshots with Scoped Storage enabled.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace polyscope

#endif  // POLYSCOPE_ERRORS_HPP
