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

// Minimal ZIP container: stored (uncompressed) members only, no zip64.
// Enough for bundles, which are small and hashed member by member.
#ifndef CTRLGEN_EXPORT_ZIP_H_
#define CTRLGEN_EXPORT_ZIP_H_

#include <string>
#include <string_view>
#include <vector>

namespace ctrlgen {

struct ZipMember {
  std::string name;
  std::string data;
};

// Archive bytes with members in the given order. Timestamps are fixed so
// equal members give equal bytes. Throws DomainError on duplicate or empty
// names and on members past 4 GiB.
std::string WriteStoredZip(const std::vector<ZipMember>& members);

// Parses an archive written by WriteStoredZip (or any stored-only ZIP).
// Throws FormatError on a malformed layout or a compressed member and
// IntegrityError when a member fails its CRC-32.
std::vector<ZipMember> ReadStoredZip(std::string_view bytes);

}  // namespace ctrlgen

#endif  // CTRLGEN_EXPORT_ZIP_H_
