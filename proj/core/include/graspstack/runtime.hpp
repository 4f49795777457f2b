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

namespace graspstack {

// Stops glibc from returning large freed blocks to the kernel, so the
// multi-megabyte activations of a training step reuse warm pages instead of
// faulting fresh ones every step. Process-wide; call once from main. No-op
// on other C libraries.
void retain_freed_memory();

}  // namespace graspstack
