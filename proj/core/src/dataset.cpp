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

#include "graspstack/dataset.hpp"

#include <numeric>

#include "graspstack/rng.hpp"

namespace graspstack {

Split split_80_10_10(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_test = n / 10;
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<long>(n_train));
  s.test.assign(idx.begin() + static_cast<long>(n_train),
                idx.begin() + static_cast<long>(n_train + n_test));
  s.val.assign(idx.begin() + static_cast<long>(n_train + n_test), idx.end());
  return s;
}

}  // namespace graspstack
