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

#include "sbforge/errors.hpp"

namespace sbforge {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedJson: return "MalformedJson";
    case ErrorKind::UnknownOpcode: return "UnknownOpcode";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::LinkInconsistency: return "LinkInconsistency";
    case ErrorKind::DuplicateIdentifier: return "DuplicateIdentifier";
    case ErrorKind::TargetNotFound: return "TargetNotFound";
    case ErrorKind::UnknownSignal: return "UnknownSignal";
    case ErrorKind::SchemaInvalid: return "SchemaInvalid";
    case ErrorKind::DuplicateTarget: return "DuplicateTarget";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::ResultInvalid: return "ResultInvalid";
    case ErrorKind::NonInvertibleEdit: return "NonInvertibleEdit";
    case ErrorKind::IneligibleSite: return "IneligibleSite";
    case ErrorKind::MisalignedTraces: return "MisalignedTraces";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Internal: return "Internal";
  }
  return "Error";
}

}  // namespace sbforge
