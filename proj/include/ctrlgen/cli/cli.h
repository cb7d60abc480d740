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

// Command-line front end. Kept out of main() so tests can run it in-process.
#ifndef CTRLGEN_CLI_CLI_H_
#define CTRLGEN_CLI_CLI_H_

#include <iosfwd>
#include <string>

#include "ctrlgen/core/types.h"

namespace ctrlgen {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

// Runs one subcommand. Results go to `out`; failures are written to `err`
// as one JSON object {"error": code, "detail": message} and mapped to the
// exit codes above.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// A table given on the command line: a path to a JSON table, inline JSON,
// or a meaning representation such as "name[The Phoenix], food[French]".
DataTable ReadTableArg(const std::string& arg);

}  // namespace ctrlgen

#endif  // CTRLGEN_CLI_CLI_H_
