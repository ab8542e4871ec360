// Copyright 2026 The slopeland Authors
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

// Command-line front end. Tests drive it in-process through main().
//
//   slopeland run --config <path> [--set key=value]... [--out <dir>]
//   slopeland experiment --set-file <path> [--out <dir>] [--jobs <n>]
//   slopeland replay --log <path> [--config <path>] [--out <dir>]
//   slopeland workspace --resolution <n> [--set arm.key=value]... [--out <dir>]
//
// Output root: --out, else $SLOPELAND_OUT, else ./out.
// Exit codes: 0 success (run: Landed), 1 run Aborted, 2 usage or input error.

#pragma once

#include <ostream>

namespace slopeland::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAborted = 1;
inline constexpr int kExitUsage = 2;

// Parses argv and runs one subcommand. Never throws for user errors; they are
// reported on `err` with kExitUsage.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slopeland::cli
