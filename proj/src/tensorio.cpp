// Copyright 2026 The invgrid Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "invgrid/tensorio.hpp"

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

namespace invgrid {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::atomic<std::uint64_t> g_temp_counter{0};

}  // namespace

std::string encode_tensor(const Grid& grid) {
  if (grid.dims().size() > 255) throw std::invalid_argument("tensor rank exceeds 255");
  std::string out = "GRDT";
  put_u16(out, kTensorVersion);
  out += static_cast<char>(grid.dtype());
  out += static_cast<char>(grid.dims().size());
  for (auto d : grid.dims()) put_u32(out, d);
  out.reserve(out.size() + grid.byte_size());
  if (grid.dtype() == DType::U8) {
    const auto data = grid.u8_data();
    out.append(reinterpret_cast<const char*>(data.data()), data.size());
  } else {
    for (float v : grid.f32_data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

Grid decode_tensor(std::string_view bytes) {
  using K = TensorError::Kind;
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 8) {
    if (bytes.size() >= 4 && bytes.substr(0, 4) != "GRDT") throw TensorError(K::BadMagic, "tensor: bad magic");
    throw TensorError(K::Truncated, "tensor: truncated header (" + std::to_string(bytes.size()) + " bytes)");
  }
  if (bytes.substr(0, 4) != "GRDT") throw TensorError(K::BadMagic, "tensor: bad magic");
  const std::uint16_t version = static_cast<std::uint16_t>(p[4] | (p[5] << 8));
  if (version != kTensorVersion) {
    throw TensorError(K::BadVersion, "tensor: unsupported version " + std::to_string(version));
  }
  if (p[6] > 1) throw TensorError(K::BadDType, "tensor: unknown dtype " + std::to_string(p[6]));
  const auto dtype = static_cast<DType>(p[6]);
  const std::size_t ndim = p[7];
  const std::size_t header = 8 + 4 * ndim;
  if (bytes.size() < header) throw TensorError(K::Truncated, "tensor: truncated dimension list");
  std::vector<std::uint32_t> dims(ndim);
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    dims[i] = get_u32(p + 8 + 4 * i);
    if (__builtin_mul_overflow(count, std::size_t{dims[i]}, &count)) {
      throw TensorError(K::Truncated, "tensor: dimensions exceed the file size");
    }
  }
  std::size_t payload = 0;
  if (__builtin_mul_overflow(count, dtype_size(dtype), &payload)) {
    throw TensorError(K::Truncated, "tensor: dimensions exceed the file size");
  }
  if (bytes.size() - header < payload) {
    throw TensorError(K::Truncated, "tensor: payload truncated, expected " + std::to_string(payload) + " bytes, got " +
                                        std::to_string(bytes.size() - header));
  }
  if (bytes.size() - header > payload) {
    throw TensorError(K::TrailingBytes,
                      "tensor: " + std::to_string(bytes.size() - header - payload) + " trailing bytes");
  }
  if (dtype == DType::U8) {
    Grid g = Grid::u8(std::move(dims));
    std::memcpy(g.u8_data().data(), p + header, payload);
    return g;
  }
  Grid g = Grid::f32(std::move(dims));
  auto out = g.f32_data();
  for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<float>(get_u32(p + header + 4 * i));
  return g;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id() << "." << g_temp_counter.fetch_add(1);
  const std::filesystem::path tmp = path.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw TensorError(TensorError::Kind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw TensorError(TensorError::Kind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw TensorError(TensorError::Kind::Io, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TensorError(TensorError::Kind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_tensor(const std::filesystem::path& path, const Grid& grid) {
  write_file_atomic(path, encode_tensor(grid));
}

Grid read_tensor(const std::filesystem::path& path) { return decode_tensor(read_file_bytes(path)); }

}  // namespace invgrid
