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

#include "zip_archive.hpp"

#include <zlib.h>

#include <cstring>

#include "sbforge/errors.hpp"

namespace sbforge::zip {

namespace {

uint16_t rd16(std::string_view b, size_t off) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[off]) |
                               (static_cast<uint8_t>(b[off + 1]) << 8));
}

uint32_t rd32(std::string_view b, size_t off) {
  return static_cast<uint32_t>(static_cast<uint8_t>(b[off])) |
         (static_cast<uint32_t>(static_cast<uint8_t>(b[off + 1])) << 8) |
         (static_cast<uint32_t>(static_cast<uint8_t>(b[off + 2])) << 16) |
         (static_cast<uint32_t>(static_cast<uint8_t>(b[off + 3])) << 24);
}

std::string inflate_raw(std::string_view compressed, size_t expected_size) {
  std::string out(expected_size, '\0');
  z_stream zs;
  std::memset(&zs, 0, sizeof zs);
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    throw Error(ErrorKind::Io, "zlib init failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected_size) {
    throw Error(ErrorKind::Io, "zip entry failed to inflate");
  }
  return out;
}

}  // namespace

const std::string* Archive::find(std::string_view name) const {
  auto it = entries.find(std::string(name));
  return it == entries.end() ? nullptr : &it->second;
}

bool looks_like_zip(std::string_view bytes) {
  return bytes.size() >= 4 && bytes[0] == 'P' && bytes[1] == 'K' && bytes[2] == '\x03' &&
         bytes[3] == '\x04';
}

Archive read_archive(std::string_view bytes) {
  // Find the end-of-central-directory record (scan the tail for its magic).
  constexpr uint32_t kEocd = 0x06054b50;
  constexpr uint32_t kCdEntry = 0x02014b50;
  constexpr uint32_t kLocal = 0x04034b50;
  if (bytes.size() < 22) throw Error(ErrorKind::Io, "zip too small");
  size_t scan_from = bytes.size() >= 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
  size_t eocd = std::string::npos;
  for (size_t i = bytes.size() - 22 + 1; i-- > scan_from;) {
    if (rd32(bytes, i) == kEocd) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw Error(ErrorKind::Io, "zip: no end-of-central-directory");

  uint16_t count = rd16(bytes, eocd + 10);
  uint32_t cd_off = rd32(bytes, eocd + 16);

  Archive out;
  size_t p = cd_off;
  for (uint16_t i = 0; i < count; ++i) {
    if (p + 46 > bytes.size() || rd32(bytes, p) != kCdEntry) {
      throw Error(ErrorKind::Io, "zip: bad central directory");
    }
    uint16_t method = rd16(bytes, p + 10);
    uint32_t csize = rd32(bytes, p + 20);
    uint32_t usize = rd32(bytes, p + 24);
    uint16_t name_len = rd16(bytes, p + 28);
    uint16_t extra_len = rd16(bytes, p + 30);
    uint16_t comment_len = rd16(bytes, p + 32);
    uint32_t local_off = rd32(bytes, p + 42);
    std::string name(bytes.substr(p + 46, name_len));
    p += 46 + name_len + extra_len + comment_len;

    if (local_off + 30 > bytes.size() || rd32(bytes, local_off) != kLocal) {
      throw Error(ErrorKind::Io, "zip: bad local header for " + name);
    }
    uint16_t lname = rd16(bytes, local_off + 26);
    uint16_t lextra = rd16(bytes, local_off + 28);
    size_t data_off = local_off + 30 + lname + lextra;
    if (data_off + csize > bytes.size()) throw Error(ErrorKind::Io, "zip: truncated " + name);
    std::string_view data = bytes.substr(data_off, csize);

    if (method == 0) {
      out.entries.emplace(std::move(name), std::string(data));
    } else if (method == 8) {
      out.entries.emplace(std::move(name), inflate_raw(data, usize));
    } else {
      throw Error(ErrorKind::Io, "zip: unsupported compression method for " + name);
    }
  }
  return out;
}

}  // namespace sbforge::zip
