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

#include "invgrid/gridify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "invgrid/rng.hpp"
#include "invgrid/tensorio.hpp"
#include "invgrid/utf8.hpp"

namespace invgrid {

namespace {

std::vector<const Word*> in_reading_order(const std::vector<Word>& words) {
  std::vector<const Word*> ordered;
  ordered.reserve(words.size());
  for (const auto& w : words) ordered.push_back(&w);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Word* a, const Word* b) { return a->reading_order < b->reading_order; });
  return ordered;
}

std::pair<std::uint32_t, std::uint32_t> scale_span(double lo, double hi, double extent, std::uint32_t cells) {
  const double a = std::floor(lo * cells / extent);
  const double b = std::ceil(hi * cells / extent);
  auto start = static_cast<std::uint32_t>(std::clamp(a, 0.0, static_cast<double>(cells - 1)));
  auto end = static_cast<std::uint32_t>(std::clamp(b, 0.0, static_cast<double>(cells)));
  if (end <= start) end = start + 1;
  return {start, end};
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

}  // namespace

std::uint8_t vocab_index(char32_t cp) noexcept {
  if (cp >= 0x20 && cp <= 0x7E) return static_cast<std::uint8_t>(cp - 0x1F);
  return kOovIndex;
}

std::uint64_t vocab_hash() {
  std::string table;
  for (char32_t cp = 0x20; cp <= 0x7E; ++cp) {
    table += static_cast<char>(cp);
    table += static_cast<char>(vocab_index(cp));
  }
  table += "oov";
  table += static_cast<char>(kOovIndex);
  return fnv1a64(table);
}

CellRect to_cell(const BBox& box, const PageSize& page, const GridConfig& cfg) {
  const auto [r0, r1] = scale_span(box.y0, box.y1, page.height, cfg.height);
  const auto [c0, c1] = scale_span(box.x0, box.x1, page.width, cfg.width);
  return {r0, c0, r1, c1};
}

BBox page_to_grid(const BBox& box, const PageSize& page, const GridConfig& cfg) {
  return BBox(box.x0 * cfg.width / page.width, box.y0 * cfg.height / page.height, box.x1 * cfg.width / page.width,
              box.y1 * cfg.height / page.height);
}

Grid build_chargrid(const std::vector<Word>& words, const PageSize& page, const GridConfig& cfg) {
  Grid grid = Grid::u8({cfg.height, cfg.width}, kBackgroundIndex);
  auto data = grid.u8_data();
  for (const Word* w : in_reading_order(words)) {
    const auto glyphs = utf8::decode(w->text);
    if (glyphs.empty()) continue;
    const CellRect rect = to_cell(w->box, page, cfg);
    const std::size_t span = rect.c1 - rect.c0;
    const std::size_t n = glyphs.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c_begin = rect.c0 + i * span / n;
      const std::size_t c_end = rect.c0 + (i + 1) * span / n;
      const std::uint8_t idx = vocab_index(glyphs[i]);
      for (std::uint32_t r = rect.r0; r < rect.r1; ++r) {
        for (std::size_t c = c_begin; c < c_end; ++c) data[grid.offset(r, c)] = idx;
      }
    }
  }
  return grid;
}

std::vector<float> hashed_embedding(std::string_view word, std::size_t dim) {
  if (dim == 0) throw EmbeddingError("embedding dimension must be at least 1");
  std::uint64_t state = fnv1a64(word);
  std::vector<double> raw(dim);
  double norm2 = 0;
  for (auto& v : raw) {
    v = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    norm2 += v * v;
  }
  std::vector<float> out(dim);
  if (norm2 == 0.0) {
    out[0] = 1.0f;
    return out;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(raw[i] * inv);
  return out;
}

HashedEmbedding::HashedEmbedding(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw EmbeddingError("embedding dimension must be at least 1");
}

SidecarEmbedding SidecarEmbedding::parse(std::string_view bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 12 || bytes.substr(0, 4) != "EMBD") throw EmbeddingError("embedding sidecar: bad magic");
  const std::uint32_t version = get_u32(p + 4);
  if (version != 1) throw EmbeddingError("embedding sidecar: unsupported version " + std::to_string(version));
  SidecarEmbedding out;
  out.dim_ = get_u32(p + 8);
  if (out.dim_ == 0) throw EmbeddingError("embedding sidecar: dimension 0");
  std::size_t pos = 12;
  while (pos < bytes.size()) {
    if (pos + 2 > bytes.size()) throw EmbeddingError("embedding sidecar: truncated record header");
    const std::size_t len = static_cast<std::size_t>(p[pos] | (p[pos + 1] << 8));
    pos += 2;
    if (pos + len + 4 * out.dim_ > bytes.size()) throw EmbeddingError("embedding sidecar: truncated record");
    std::string word(bytes.substr(pos, len));
    pos += len;
    std::vector<float> vec(out.dim_);
    for (auto& v : vec) {
      v = std::bit_cast<float>(get_u32(p + pos));
      pos += 4;
      if (!std::isfinite(v)) throw EmbeddingError("embedding sidecar: non-finite component for '" + word + "'");
    }
    out.table_.insert_or_assign(std::move(word), std::move(vec));
  }
  return out;
}

SidecarEmbedding SidecarEmbedding::load(const std::filesystem::path& path) {
  try {
    return parse(read_file_bytes(path));
  } catch (const TensorError& e) {
    throw EmbeddingError(e.what());
  }
}

std::vector<float> SidecarEmbedding::lookup(std::string_view word) const {
  auto it = table_.find(std::string(word));
  if (it == table_.end()) throw EmbeddingError("no embedding for '" + std::string(word) + "'");
  return it->second;
}

std::string encode_embedding_sidecar(std::size_t dim,
                                     const std::vector<std::pair<std::string, std::vector<float>>>& entries) {
  std::string out = "EMBD";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(dim));
  for (const auto& [word, vec] : entries) {
    if (word.size() > 0xFFFF) throw EmbeddingError("embedding sidecar: word longer than 65535 bytes");
    if (vec.size() != dim) throw EmbeddingError("embedding sidecar: vector for '" + word + "' has wrong length");
    out += static_cast<char>(word.size() & 0xFF);
    out += static_cast<char>(word.size() >> 8);
    out += word;
    for (float v : vec) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

Grid build_wordgrid(const std::vector<Word>& words, const PageSize& page, const GridConfig& cfg,
                    const EmbeddingProvider& provider) {
  if (provider.dim() != cfg.embed_dim) {
    throw EmbeddingError("provider dimension " + std::to_string(provider.dim()) + " != configured " +
                         std::to_string(cfg.embed_dim));
  }
  const std::size_t dim = cfg.embed_dim;
  Grid grid = Grid::f32({cfg.height, cfg.width, cfg.embed_dim}, 0.0f);
  auto data = grid.f32_data();
  for (const Word* w : in_reading_order(words)) {
    std::vector<float> vec;
    try {
      vec = provider.lookup(w->text);
    } catch (const EmbeddingError& e) {
      throw EmbeddingError("word '" + w->text + "' (reading order " + std::to_string(w->reading_order) +
                           "): " + e.what());
    }
    if (vec.size() != dim) throw EmbeddingError("word '" + w->text + "': provider returned wrong dimension");
    const CellRect rect = to_cell(w->box, page, cfg);
    for (std::uint32_t r = rect.r0; r < rect.r1; ++r) {
      for (std::uint32_t c = rect.c0; c < rect.c1; ++c) {
        std::memcpy(&data[grid.offset(r, c)], vec.data(), dim * sizeof(float));
      }
    }
  }
  return grid;
}

}  // namespace invgrid
