/* Copyright 2026 The DSLP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef DSLP_DGF_H_
#define DSLP_DGF_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dslp/field.h"

namespace dslp {

// Binary grid container, layout:
//   "DGF1" | u32 I | u32 J | f32 cell_size | u32 channel_count |
//   channel_count x (u16 name_len | name bytes | I*J f32, j outer, i inner)
// All integers and floats little-endian. Values are kept as f32 so that
// Decode(Encode(x)) and Encode(Decode(bytes)) are both bit-exact.
struct DgfChannel {
  std::string name;
  std::vector<float> values;
};

struct DgfFile {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  float cell_size = 1.0f;
  std::vector<DgfChannel> channels;

  const DgfChannel* Find(const std::string& name) const;
  bool Has(const std::string& name) const { return Find(name) != nullptr; }

  void Add(const std::string& name, const GridField& field);
  GridField Get(const std::string& name) const;  // throws if missing
};

std::vector<std::uint8_t> EncodeDgf(const DgfFile& file);
DgfFile DecodeDgf(const std::vector<std::uint8_t>& bytes);

void WriteDgf(const std::string& path, const DgfFile& file);
DgfFile ReadDgf(const std::string& path);

std::vector<std::uint8_t> ReadBytes(const std::string& path);
void WriteBytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace dslp

#endif  // DSLP_DGF_H_
