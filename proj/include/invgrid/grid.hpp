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

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace invgrid {

enum class DType : std::uint8_t { U8 = 0, F32 = 1 };

inline std::size_t dtype_size(DType t) noexcept { return t == DType::U8 ? 1 : 4; }

/// Dense row-major tensor, last dimension fastest. Holds either u8 or f32
/// values; the other buffer stays empty.
class Grid {
 public:
  Grid() = default;

  static Grid u8(std::vector<std::uint32_t> dims, std::uint8_t fill = 0) {
    Grid g(std::move(dims), DType::U8);
    g.u8_.assign(g.size(), fill);
    return g;
  }
  static Grid f32(std::vector<std::uint32_t> dims, float fill = 0.0f) {
    Grid g(std::move(dims), DType::F32);
    if (fill == 0.0f && !std::signbit(fill)) {
      g.f32_.resize(g.size());
    } else {
      g.f32_.assign(g.size(), fill);
    }
    return g;
  }

  const std::vector<std::uint32_t>& dims() const noexcept { return dims_; }
  DType dtype() const noexcept { return dtype_; }
  std::size_t size() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  }
  std::size_t byte_size() const noexcept { return size() * dtype_size(dtype_); }

  std::span<std::uint8_t> u8_data() {
    require(DType::U8);
    return u8_;
  }
  std::span<const std::uint8_t> u8_data() const {
    require(DType::U8);
    return u8_;
  }
  std::span<float> f32_data() {
    require(DType::F32);
    return f32_;
  }
  std::span<const float> f32_data() const {
    require(DType::F32);
    return f32_;
  }

  // Flat offset of (i, j[, k]) for 2-D / 3-D grids.
  std::size_t offset(std::size_t i, std::size_t j, std::size_t k = 0) const noexcept {
    const std::size_t c = dims_.size() > 2 ? dims_[2] : 1;
    return (i * dims_[1] + j) * c + k;
  }

  bool all_finite() const {
    if (dtype_ == DType::U8) return true;
    for (float v : f32_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Grid(std::vector<std::uint32_t> dims, DType t) : dims_(std::move(dims)), dtype_(t) {}

  void require(DType t) const {
    if (dtype_ != t) throw std::logic_error("grid dtype mismatch");
  }

  std::vector<std::uint32_t> dims_;
  DType dtype_ = DType::U8;
  std::vector<std::uint8_t> u8_;
  std::vector<float> f32_;
};

}  // namespace invgrid
