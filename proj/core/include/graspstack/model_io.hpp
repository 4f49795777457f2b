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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspstack/model.hpp"

namespace graspstack {

inline constexpr char kModelMagic[4] = {'G', 'R', 'S', 'P'};
inline constexpr std::uint16_t kModelFormatVersion = 1;

// Malformed or truncated model data. `offset` is the byte position (binary)
// at which decoding failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Binary container, little-endian:
//   "GRSP" u16 version
//   u8 name_len, name
//   u8 rank, u32 dims[rank]              input shape
//   u8 has_input_exp, i8 input_exp
//   u16 n, layer[n]                      trunk
//   u8 heads, { u8 loss, u8 name_len, name, u16 n, layer[n] }[heads]
// layer:
//   u8 kind, u8 n_hyper, i32 hyper[n_hyper]
//   u8 n_tensors, { u8 rank, u32 dims[rank], f32 data[] }[n_tensors]
//   u8 has_int8, [ i8 weight_exp, i8 output_exp, u32 count, i8 data[count] ]
std::vector<std::uint8_t> encode_model(const ModelGraph& model);
ModelGraph decode_model(const std::vector<std::uint8_t>& bytes);

// JSON mirror using the same field names as the binary layout.
nlohmann::json model_to_json(const ModelGraph& model);
ModelGraph model_from_json(const nlohmann::json& j);

// Writes binary unless the extension is ".json".
void save_model(const ModelGraph& model, const std::filesystem::path& path);
// Detects the format from the first byte.
ModelGraph load_model(const std::filesystem::path& path);

}  // namespace graspstack
