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

#include <filesystem>
#include <string>

#include "sbforge/forge.hpp"

namespace sbforge {

// A bug instance on disk is a directory of seven files:
//   gold.json  buggy.json  forward.patch.json  inverse.patch.json
//   bugspec.json  testsuite.json  refsem.json

void write_bundle(const std::filesystem::path& dir, const BugInstance& instance);
BugInstance read_bundle(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace sbforge
