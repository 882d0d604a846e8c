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

#include "sbforge/bundle.hpp"

#include <fstream>
#include <sstream>

#include "sbforge/errors.hpp"

namespace sbforge {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

void write_bundle(const fs::path& dir, const BugInstance& instance) {
  fs::create_directories(dir);
  write_file(dir / "gold.json", serialize_project(instance.gold));
  write_file(dir / "buggy.json", serialize_project(instance.buggy));
  write_file(dir / "forward.patch.json", patch_to_json(instance.forward));
  write_file(dir / "inverse.patch.json", patch_to_json(instance.inverse));
  write_file(dir / "bugspec.json", instance.spec.to_json());
  write_file(dir / "testsuite.json", instance.suite.to_json());
  write_file(dir / "refsem.json", instance.refsem.to_json());
}

BugInstance read_bundle(const fs::path& dir) {
  BugInstance b;
  b.gold = parse_project(read_file(dir / "gold.json"));
  b.buggy = parse_project(read_file(dir / "buggy.json"));
  b.forward = validate_patch(read_file(dir / "forward.patch.json"));
  b.inverse = validate_patch(read_file(dir / "inverse.patch.json"));
  b.spec = BugSpec::from_json(read_file(dir / "bugspec.json"));
  b.suite = TestSuite::from_json(read_file(dir / "testsuite.json"));
  b.refsem = ReferenceSemantics::from_json(read_file(dir / "refsem.json"));
  return b;
}

}  // namespace sbforge
