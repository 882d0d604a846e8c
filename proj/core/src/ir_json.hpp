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

// JSON codecs for IR fragments, shared between the project format and the
// patch format (patch payloads and modify values use the exact same
// encodings as project.json).

#pragma once

#include <optional>
#include <string>

#include "json_io.hpp"
#include "sbforge/project_ir.hpp"

namespace sbforge::irj {

using jio::json;

json input_to_json(const InputValue& iv);
/// nullopt means an explicit empty slot ([1, null] or null payload).
std::optional<InputValue> input_from_json(const json& j, const std::string& ctx);

json field_to_json(const FieldValue& fv);
FieldValue field_from_json(const json& j, const std::string& ctx);

json mutation_to_json(const Mutation& m);
Mutation mutation_from_json(const json& j);

}  // namespace sbforge::irj
