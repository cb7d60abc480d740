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

#ifndef CTRLGEN_MODEL_CHECKPOINT_H_
#define CTRLGEN_MODEL_CHECKPOINT_H_

#include <string>
#include <string_view>

#include "ctrlgen/model/params.h"

namespace ctrlgen {

inline constexpr int kCheckpointVersion = 1;

// Layout: 8-byte magic "CGCKPT01", uint64 little-endian header length, JSON
// header (config, symbol tables, vocab hash, tensor table, blob digest),
// then every tensor in Tensor order, column-major, as little-endian float32.
std::string SerializeCheckpoint(const ModelParams& params);
// FormatError for a malformed file, CompatibilityError for a version, shape
// or vocab-hash mismatch, IntegrityError when the blob digest differs.
ModelParams DeserializeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const ModelParams& params, const std::string& path);
ModelParams LoadCheckpoint(const std::string& path);

}  // namespace ctrlgen

#endif  // CTRLGEN_MODEL_CHECKPOINT_H_
