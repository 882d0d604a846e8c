// Copyright 2026 The sbforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace sbforge {

enum class ErrorKind {
  // Project parsing / validation.
  MalformedJson,
  UnknownOpcode,
  DanglingReference,
  LinkInconsistency,
  DuplicateIdentifier,
  // VM.
  TargetNotFound,
  UnknownSignal,
  // Patches.
  SchemaInvalid,
  DuplicateTarget,
  NotApplicable,
  ResultInvalid,
  NonInvertibleEdit,
  // Forge.
  IneligibleSite,
  // Metrics.
  MisalignedTraces,
  // I/O and everything else.
  Io,
  Internal,
};

const char* error_kind_name(ErrorKind k);

/// Single exception type for every contract violation the library reports.
/// `kind()` is the machine-checkable part; `detail` carries the offending
/// identifier (opcode name, block id, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string detail)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail),
        kind_(kind),
        detail_(std::move(detail)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace sbforge
