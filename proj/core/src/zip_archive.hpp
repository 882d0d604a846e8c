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

// Minimal read-only zip support for the sb3 container: stored and
// deflated entries, no zip64, no encryption. Enough for project.json
// plus asset entries.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace sbforge::zip {

struct Archive {
  // entry name -> decompressed bytes
  std::map<std::string, std::string> entries;

  const std::string* find(std::string_view name) const;
};

bool looks_like_zip(std::string_view bytes);

/// Throws Error(Io) on structural problems.
Archive read_archive(std::string_view bytes);

}  // namespace sbforge::zip
