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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "invgrid/docmodel.hpp"
#include "invgrid/grid.hpp"

namespace invgrid {

inline constexpr std::uint8_t kBackgroundIndex = 0;
inline constexpr std::uint8_t kOovIndex = 96;
inline constexpr std::size_t kVocabSize = 97;

/// Raster geometry for the model input. Rows run down the page (portrait).
struct GridConfig {
  std::uint32_t height = 364;  // rows
  std::uint32_t width = 256;   // columns
  std::uint32_t embed_dim = 96;
};

// Printable ASCII 0x20-0x7E -> 1..95, anything else -> 96. 0 is background.
std::uint8_t vocab_index(char32_t cp) noexcept;
std::uint64_t vocab_hash();

// Half-open cell rectangle [r0, r1) x [c0, c1).
struct CellRect {
  std::uint32_t r0 = 0, c0 = 0, r1 = 0, c1 = 0;

  std::size_t area() const noexcept { return std::size_t{r1 - r0} * (c1 - c0); }
  friend bool operator==(const CellRect&, const CellRect&) = default;
};

// Scales a page box onto the grid: floor for the leading edges, ceil for the
// trailing edges, widened to at least one cell.
CellRect to_cell(const BBox& box, const PageSize& page, const GridConfig& cfg);

// Continuous page -> grid scaling, x to columns and y to rows.
BBox page_to_grid(const BBox& box, const PageSize& page, const GridConfig& cfg);

// H x W u8 character indices. Each word's cell rectangle is split into
// equal column spans, one per character. Later words (reading order) win.
Grid build_chargrid(const std::vector<Word>& words, const PageSize& page, const GridConfig& cfg);

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  // Exactly dim() finite components. Throws EmbeddingError when unavailable.
  virtual std::vector<float> lookup(std::string_view word) const = 0;
};

// FNV-1a(word bytes) seeds a splitmix64 stream; each draw maps to [-1, 1];
// the vector is L2-normalized.
std::vector<float> hashed_embedding(std::string_view word, std::size_t dim);

class HashedEmbedding final : public EmbeddingProvider {
 public:
  explicit HashedEmbedding(std::size_t dim);
  std::size_t dim() const override { return dim_; }
  std::vector<float> lookup(std::string_view word) const override { return hashed_embedding(word, dim_); }

 private:
  std::size_t dim_;
};

/// Vectors supplied by an external tool. File layout (little-endian):
///   "EMBD" | u32 version=1 | u32 D | repeated { u16 len | len UTF-8 bytes | D x f32 }
class SidecarEmbedding final : public EmbeddingProvider {
 public:
  static SidecarEmbedding parse(std::string_view bytes);
  static SidecarEmbedding load(const std::filesystem::path& path);

  std::size_t dim() const override { return dim_; }
  std::vector<float> lookup(std::string_view word) const override;
  std::size_t entries() const noexcept { return table_.size(); }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<float>> table_;
};

std::string encode_embedding_sidecar(std::size_t dim,
                                     const std::vector<std::pair<std::string, std::vector<float>>>& entries);

// H x W x D f32: each word's full rectangle holds provider.lookup(text),
// background is zero. Later words (reading order) win.
Grid build_wordgrid(const std::vector<Word>& words, const PageSize& page, const GridConfig& cfg,
                    const EmbeddingProvider& provider);

}  // namespace invgrid
