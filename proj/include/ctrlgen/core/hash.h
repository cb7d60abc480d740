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

#ifndef CTRLGEN_CORE_HASH_H_
#define CTRLGEN_CORE_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ctrlgen {

// 64-bit FNV-1a over a list of strings; each entry is terminated by a zero
// byte so ["ab","c"] and ["a","bc"] differ.
std::uint64_t Fnv1a64(const std::vector<std::string>& items,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string ToHex(std::uint64_t value);

// Lowercase hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view bytes);

}  // namespace ctrlgen

#endif  // CTRLGEN_CORE_HASH_H_
