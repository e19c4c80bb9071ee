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

#include "dslp/dgf.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace dslp {
namespace {

constexpr char kMagic[4] = {'D', 'G', 'F', '1'};

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void U16(std::uint16_t v) {
    for (int b = 0; b < 2; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void U32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void F32(float f) { U32(std::bit_cast<std::uint32_t>(f)); }
  void Raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& in) : in_(in) {}
  void Need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw std::runtime_error("DGF1: truncated file");
  }
  std::uint16_t U16() {
    Need(2);
    std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in_[pos_ + b]) << (8 * b);
    pos_ += 4;
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string Str(std::size_t n) {
    Need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

const DgfChannel* DgfFile::Find(const std::string& name) const {
  for (const auto& c : channels) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void DgfFile::Add(const std::string& name, const GridField& field) {
  if (channels.empty() && width == 0) {
    width = static_cast<std::uint32_t>(field.width());
    height = static_cast<std::uint32_t>(field.height());
    cell_size = static_cast<float>(field.cell_size());
  }
  if (static_cast<int>(width) != field.width() ||
      static_cast<int>(height) != field.height()) {
    throw std::invalid_argument("DGF1: channel '" + name +
                                "' does not match file dimensions");
  }
  DgfChannel c{name, {}};
  c.values.reserve(field.size());
  for (double v : field.values()) c.values.push_back(static_cast<float>(v));
  channels.push_back(std::move(c));
}

GridField DgfFile::Get(const std::string& name) const {
  const DgfChannel* c = Find(name);
  if (c == nullptr) throw std::out_of_range("DGF1: missing channel '" + name + "'");
  std::vector<double> values(c->values.begin(), c->values.end());
  return GridField(static_cast<int>(width), static_cast<int>(height), cell_size,
                   std::move(values));
}

std::vector<std::uint8_t> EncodeDgf(const DgfFile& file) {
  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  w.Raw(kMagic, 4);
  w.U32(file.width);
  w.U32(file.height);
  w.F32(file.cell_size);
  w.U32(static_cast<std::uint32_t>(file.channels.size()));
  const std::size_t n = static_cast<std::size_t>(file.width) * file.height;
  for (const auto& c : file.channels) {
    if (c.name.size() > 0xFFFF) throw std::invalid_argument("DGF1: channel name too long");
    if (c.values.size() != n) {
      throw std::invalid_argument("DGF1: channel '" + c.name + "' has wrong size");
    }
    w.U16(static_cast<std::uint16_t>(c.name.size()));
    w.Raw(c.name.data(), c.name.size());
    for (float v : c.values) w.F32(v);
  }
  return out;
}

DgfFile DecodeDgf(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  if (r.Str(4) != std::string(kMagic, 4)) throw std::runtime_error("DGF1: bad magic");
  DgfFile f;
  f.width = r.U32();
  f.height = r.U32();
  f.cell_size = r.F32();
  const std::uint32_t count = r.U32();
  const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
  for (std::uint32_t c = 0; c < count; ++c) {
    DgfChannel ch;
    ch.name = r.Str(r.U16());
    r.Need(4 * n);
    ch.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) ch.values[k] = r.F32();
    f.channels.push_back(std::move(ch));
  }
  if (!r.AtEnd()) throw std::runtime_error("DGF1: trailing bytes");
  return f;
}

std::vector<std::uint8_t> ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteBytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void WriteDgf(const std::string& path, const DgfFile& file) {
  WriteBytes(path, EncodeDgf(file));
}

DgfFile ReadDgf(const std::string& path) { return DecodeDgf(ReadBytes(path)); }

}  // namespace dslp
