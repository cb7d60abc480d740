// Copyright 2026 The ctrlgen Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctrlgen/export/zip.h"

#include <zlib.h>

#include <cstdint>
#include <limits>
#include <set>

#include "ctrlgen/core/errors.h"

namespace ctrlgen {
namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::size_t kLocalSize = 30;
constexpr std::size_t kCentralSize = 46;
constexpr std::size_t kEndSize = 22;
// 1980-01-01 00:00 in DOS format.
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;

void Put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void Put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t Crc32(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks to stay portable.
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t n = std::min<std::size_t>(data.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + pos),
                static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint16_t U16(std::size_t at) const {
    Need(at, 2);
    return static_cast<std::uint16_t>(Byte(at) | (Byte(at + 1) << 8));
  }
  std::uint32_t U32(std::size_t at) const {
    Need(at, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | Byte(at + i);
    return v;
  }
  std::string_view Slice(std::size_t at, std::size_t n) const {
    Need(at, n);
    return bytes_.substr(at, n);
  }
  std::size_t size() const { return bytes_.size(); }

 private:
  std::uint32_t Byte(std::size_t at) const {
    return static_cast<unsigned char>(bytes_[at]);
  }
  void Need(std::size_t at, std::size_t n) const {
    if (at > bytes_.size() || n > bytes_.size() - at) {
      throw FormatError("zip archive truncated at offset " + std::to_string(at));
    }
  }
  std::string_view bytes_;
};

}  // namespace

std::string WriteStoredZip(const std::vector<ZipMember>& members) {
  std::set<std::string> names;
  std::string out;
  std::string central;
  for (const ZipMember& m : members) {
    if (m.name.empty() || m.name.size() > 0xffff) {
      throw DomainError("zip member name must have 1..65535 bytes");
    }
    if (!names.insert(m.name).second) {
      throw DomainError("duplicate zip member '" + m.name + "'");
    }
    if (m.data.size() >= std::numeric_limits<std::uint32_t>::max() ||
        out.size() >= std::numeric_limits<std::uint32_t>::max()) {
      throw DomainError("zip member '" + m.name + "' too large");
    }
    std::uint32_t crc = Crc32(m.data);
    auto size = static_cast<std::uint32_t>(m.data.size());
    auto offset = static_cast<std::uint32_t>(out.size());

    Put32(out, kLocalSig);
    Put16(out, 20);  // version needed
    Put16(out, 0);   // flags
    Put16(out, 0);   // stored
    Put16(out, kDosTime);
    Put16(out, kDosDate);
    Put32(out, crc);
    Put32(out, size);
    Put32(out, size);
    Put16(out, static_cast<std::uint16_t>(m.name.size()));
    Put16(out, 0);
    out += m.name;
    out += m.data;

    Put32(central, kCentralSig);
    Put16(central, 20);  // made by
    Put16(central, 20);
    Put16(central, 0);
    Put16(central, 0);
    Put16(central, kDosTime);
    Put16(central, kDosDate);
    Put32(central, crc);
    Put32(central, size);
    Put32(central, size);
    Put16(central, static_cast<std::uint16_t>(m.name.size()));
    Put16(central, 0);  // extra
    Put16(central, 0);  // comment
    Put16(central, 0);  // disk
    Put16(central, 0);  // internal attrs
    Put32(central, 0);  // external attrs
    Put32(central, offset);
    central += m.name;
  }
  if (members.size() > 0xffff) throw DomainError("too many zip members");
  auto central_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  Put32(out, kEndSig);
  Put16(out, 0);
  Put16(out, 0);
  Put16(out, static_cast<std::uint16_t>(members.size()));
  Put16(out, static_cast<std::uint16_t>(members.size()));
  Put32(out, static_cast<std::uint32_t>(central.size()));
  Put32(out, central_offset);
  Put16(out, 0);
  return out;
}

std::vector<ZipMember> ReadStoredZip(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < kEndSize) throw FormatError("not a zip archive");
  // The end record sits at the tail, possibly followed by a comment.
  std::size_t end = std::string_view::npos;
  std::size_t lowest = bytes.size() >= kEndSize + 0xffff ? bytes.size() - kEndSize - 0xffff : 0;
  for (std::size_t at = bytes.size() - kEndSize + 1; at-- > lowest;) {
    if (r.U32(at) == kEndSig && at + kEndSize + r.U16(at + 20) == bytes.size()) {
      end = at;
      break;
    }
  }
  if (end == std::string_view::npos) throw FormatError("zip end record not found");
  std::size_t count = r.U16(end + 10);
  std::size_t at = r.U32(end + 16);

  std::vector<ZipMember> members;
  std::set<std::string> names;
  for (std::size_t i = 0; i < count; ++i) {
    if (r.U32(at) != kCentralSig) throw FormatError("bad zip central directory");
    std::uint16_t flags = r.U16(at + 8);
    std::uint16_t method = r.U16(at + 10);
    std::uint32_t crc = r.U32(at + 16);
    std::uint32_t csize = r.U32(at + 20);
    std::uint32_t usize = r.U32(at + 24);
    std::size_t name_len = r.U16(at + 28);
    std::size_t extra_len = r.U16(at + 30);
    std::size_t comment_len = r.U16(at + 32);
    std::size_t local = r.U32(at + 42);
    std::string name(r.Slice(at + kCentralSize, name_len));
    at += kCentralSize + name_len + extra_len + comment_len;

    if (method != 0) {
      throw FormatError("zip member '" + name + "' is compressed (method " +
                        std::to_string(method) + ")");
    }
    if (flags & 1) throw FormatError("zip member '" + name + "' is encrypted");
    if (csize != usize) throw FormatError("zip member '" + name + "' has inconsistent sizes");
    if (!names.insert(name).second) throw FormatError("duplicate zip member '" + name + "'");

    if (r.U32(local) != kLocalSig) throw FormatError("bad zip local header for '" + name + "'");
    std::size_t lname = r.U16(local + 26);
    std::size_t lextra = r.U16(local + 28);
    if (r.Slice(local + kLocalSize, lname) != name) {
      throw FormatError("zip local header name differs for '" + name + "'");
    }
    std::string data(r.Slice(local + kLocalSize + lname + lextra, csize));
    if (Crc32(data) != crc) {
      throw IntegrityError("zip member '" + name + "' fails its CRC-32");
    }
    members.push_back({std::move(name), std::move(data)});
  }
  return members;
}

}  // namespace ctrlgen
