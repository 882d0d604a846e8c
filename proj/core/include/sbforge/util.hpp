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

#include <cstdint>
#include <string>
#include <string_view>

namespace sbforge {

/// FNV-1a over bytes. Used for all content digests (traces, patches,
/// bundles, asset payloads). Not cryptographic; stability across platforms
/// is the only requirement.
inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// 16-char lowercase hex rendering of a digest.
std::string hex16(uint64_t v);

inline std::string digest_hex(std::string_view bytes) { return hex16(fnv1a64(bytes)); }

/// SplitMix64. The single RNG algorithm used anywhere in the pipeline:
/// the VM's `pick random` stream and the forge's site-selection stream.
/// Identical seed => identical output sequence, on every platform.
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). n must be > 0. Modulo reduction; the tiny bias is
  /// irrelevant for site shuffling and documented for `pick random`.
  uint64_t next_below(uint64_t n) { return next() % n; }
};

/// Named substream derivation so one pipeline seed drives independent
/// random decisions without cross-talk.
inline SplitMix64 substream(uint64_t seed, std::string_view label) {
  return SplitMix64(seed * 0x9E3779B97F4A7C15ULL ^ fnv1a64(label));
}

}  // namespace sbforge
