// Copyright 2026 The graspstack Authors
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
#include <optional>
#include <string>

#include <CLI11.hpp>

namespace graspstack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBroken = 2;
inline constexpr int kExitTimeout = 3;
inline constexpr int kExitUsage = 64;

// Bad input the caller can fix: maps to kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --seed, else GRASPSTACK_SEED, else `fallback`.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback);

// Each register_* adds a subcommand; the returned code is stored in `*exit`.
void register_run(CLI::App& app, int* exit);
void register_train(CLI::App& app, int* exit);
void register_eval(CLI::App& app, int* exit);
void register_gen(CLI::App& app, int* exit);

}  // namespace graspstack::cli
