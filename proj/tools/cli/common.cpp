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

#include <cstdlib>
#include <string>

#include "commands.hpp"

namespace graspstack::cli {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  const char* env = std::getenv("GRASPSTACK_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  const std::string s(env);
  if (s.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError("GRASPSTACK_SEED must be a non-negative integer, got '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError("GRASPSTACK_SEED is out of range: '" + s + "'");
  }
}

}  // namespace graspstack::cli
