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

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "invgrid/grid.hpp"

namespace invgrid {

/// On-disk layout (all integers little-endian, no padding):
///   "GRDT" | u16 version=1 | u8 dtype (0=u8, 1=f32) | u8 ndim |
///   ndim x u32 dims | row-major payload, last dim fastest.
class TensorError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, BadVersion, BadDType, Truncated, TrailingBytes, Io };
  TensorError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint16_t kTensorVersion = 1;

std::string encode_tensor(const Grid& grid);
Grid decode_tensor(std::string_view bytes);

// Atomic: writes a sibling temp file, then renames over `path`.
void write_tensor(const std::filesystem::path& path, const Grid& grid);
Grid read_tensor(const std::filesystem::path& path);

// Shared helper: atomically replaces `path` with `bytes`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace invgrid
