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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "invgrid/gridify.hpp"
#include "invgrid/layout.hpp"
#include "invgrid/recordgen.hpp"
#include "invgrid/render.hpp"
#include "support.hpp"

using namespace invgrid;
using testsupport::word;

namespace {

const GridConfig kCfg;
const PageSize kA4;

// Independent rendition of the hashed embedding definition.
std::vector<double> oracle_embedding(const std::string& w, std::size_t dim) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : w) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  std::vector<double> v(dim);
  double n2 = 0;
  for (auto& x : v) {
    h += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = h;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    x = static_cast<double>(z >> 11) / 9007199254740992.0 * 2.0 - 1.0;
    n2 += x * x;
  }
  for (auto& x : v) x /= std::sqrt(n2);
  return v;
}

std::vector<Word> random_words(Rng& rng, std::size_t n) {
  std::vector<Word> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = rng.unit() * 500, y0 = rng.unit() * 800;
    const auto len = static_cast<std::size_t>(rng.uniform(1, 12));
    std::string text;
    for (std::size_t k = 0; k < len; ++k) text += static_cast<char>(rng.uniform(0x21, 0x7E));
    const double fs = 6 + rng.unit() * 8;
    out.push_back(Word{text, BBox(x0, y0, x0 + len * 0.6 * fs, y0 + 0.786 * fs), static_cast<std::uint32_t>(i)});
  }
  return out;
}

}  // namespace

TEST_CASE("vocabulary layout") {
  CHECK(vocab_index(U' ') == 1);
  CHECK(vocab_index(U'!') == 2);
  CHECK(vocab_index(U'A') == 0x41 - 0x1F);
  CHECK(vocab_index(U'~') == 95);
  CHECK(vocab_index(U'€') == kOovIndex);
  CHECK(vocab_index(U'\t') == kOovIndex);
  CHECK(vocab_index(0x7F) == kOovIndex);
  CHECK(kVocabSize == 97);
}

TEST_CASE("to_cell examples") {
  CHECK(to_cell(BBox(0, 0, 595, 842), kA4, kCfg) == CellRect{0, 0, 364, 256});
  CHECK(to_cell(BBox(0, 0, 59.5, 84.2), kA4, kCfg) == CellRect{0, 0, 37, 26});
  const CellRect thin = to_cell(BBox(100, 100, 100.1, 110), kA4, kCfg);
  CHECK(thin.c1 - thin.c0 == 1);
  const CellRect flat = to_cell(BBox(100, 100, 110, 100.01), kA4, kCfg);
  CHECK(flat.r1 - flat.r0 == 1);
  // a box ending exactly on a cell boundary does not spill into the next cell
  const double cw = 595.0 / 256.0;
  CHECK(to_cell(BBox(10 * cw, 0, 20 * cw, 1), kA4, kCfg).c1 == 20);
}

TEST_CASE("to_cell agrees with floor/ceil scaling") {
  Rng rng(21);
  for (int i = 0; i < 5000; ++i) {
    const double x0 = rng.unit() * 590, y0 = rng.unit() * 830;
    const BBox b(x0, y0, x0 + 0.1 + rng.unit() * (594.9 - x0), y0 + 0.1 + rng.unit() * (841.9 - y0));
    const CellRect r = to_cell(b, kA4, kCfg);
    const auto c0 = static_cast<std::uint32_t>(std::floor(b.x0 * 256 / 595));
    const auto r0 = static_cast<std::uint32_t>(std::floor(b.y0 * 364 / 842));
    CHECK(r.c0 == c0);
    CHECK(r.r0 == r0);
    CHECK(r.c1 == std::max<std::uint32_t>(c0 + 1, static_cast<std::uint32_t>(std::ceil(b.x1 * 256 / 595))));
    CHECK(r.r1 == std::max<std::uint32_t>(r0 + 1, static_cast<std::uint32_t>(std::ceil(b.y1 * 364 / 842))));
  }
}

TEST_CASE("empty chargrid is all background") {
  const Grid g = build_chargrid({}, kA4, kCfg);
  CHECK(g.dims() == std::vector<std::uint32_t>{364, 256});
  CHECK(std::all_of(g.u8_data().begin(), g.u8_data().end(), [](auto v) { return v == 0; }));
}

TEST_CASE("chargrid splits a word's columns equally per character") {
  const double cw = 595.0 / 256.0, ch = 842.0 / 364.0;
  const Grid g = build_chargrid({word("AB", 10 * cw, 5 * ch, 14 * cw, 6 * ch, 0)}, kA4, kCfg);
  for (std::uint32_t c = 8; c < 16; ++c) {
    const std::uint8_t want = c >= 10 && c < 12 ? vocab_index(U'A') : c >= 12 && c < 14 ? vocab_index(U'B') : 0;
    CHECK(g.u8_data()[g.offset(5, c)] == want);
  }
  CHECK(g.u8_data()[g.offset(4, 10)] == 0);
  CHECK(g.u8_data()[g.offset(6, 10)] == 0);
}

TEST_CASE("non-ASCII characters map to the OOV index") {
  const Grid g = build_chargrid({word("€", 100, 100, 106, 108, 0)}, kA4, kCfg);
  const CellRect r = to_cell(BBox(100, 100, 106, 108), kA4, kCfg);
  CHECK(g.u8_data()[g.offset(r.r0, r.c0)] == kOovIndex);
}

TEST_CASE("later words overwrite earlier ones") {
  const Grid g = build_chargrid({word("B", 100, 100, 110, 110, 1), word("A", 100, 100, 110, 110, 0)}, kA4, kCfg);
  const CellRect r = to_cell(BBox(100, 100, 110, 110), kA4, kCfg);
  CHECK(g.u8_data()[g.offset(r.r0, r.c0)] == vocab_index(U'B'));
}

TEST_CASE("chargrid cells equal the union of word rectangles") {
  Rng rng(5);
  for (int doc = 0; doc < 40; ++doc) {
    const auto words = random_words(rng, static_cast<std::size_t>(rng.uniform(0, 60)));
    const Grid g = build_chargrid(words, kA4, kCfg);
    std::vector<bool> covered(g.size(), false);
    for (const auto& w : words) {
      const CellRect r = to_cell(w.box, kA4, kCfg);
      for (auto y = r.r0; y < r.r1; ++y)
        for (auto x = r.c0; x < r.c1; ++x) covered[g.offset(y, x)] = true;
    }
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if ((g.u8_data()[i] != 0) != covered[i]) ++mismatches;
      if (g.u8_data()[i] >= kVocabSize) ++mismatches;
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("every rendered word covers at least one cell") {
  const Lexicons lex = load_lexicons(default_lexicon_dir());
  const auto templates = list_templates(default_template_dir());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto doc = emit_pdf(instantiate(synth_record(seed, lex), templates[seed % 10], seed)).annotation;
    const Grid g = build_chargrid(doc.words, doc.page, kCfg);
    for (const auto& w : doc.words) {
      const CellRect r = to_cell(w.box, doc.page, kCfg);
      CHECK(r.area() >= 1);
      CHECK(g.u8_data()[g.offset(r.r0, r.c0)] != 0);
    }
  }
}

TEST_CASE("hashed embedding matches an independent rendition") {
  for (const char* w : {"Invoice", "invoice", "12,50", "€", "", "a"}) {
    const auto got = hashed_embedding(w, 96);
    const auto want = oracle_embedding(w, 96);
    REQUIRE(got.size() == 96);
    for (std::size_t i = 0; i < 96; ++i) CHECK(got[i] == static_cast<float>(want[i]));
  }
}

TEST_CASE("hashed embedding golden vector for Invoice") {
  const auto golden = nlohmann::json::parse(testsupport::slurp(testsupport::source_dir() / "golden" / "hashed_invoice.json"));
  const auto v = hashed_embedding("Invoice", 96);
  const auto want = golden.at("vector").get<std::vector<float>>();
  REQUIRE(want.size() == 96);
  CHECK(v == want);
}

TEST_CASE("hashed embedding properties") {
  CHECK(hashed_embedding("Invoice", 96) == hashed_embedding("Invoice", 96));
  CHECK(hashed_embedding("Invoice", 96) != hashed_embedding("invoice", 96));
  for (const char* w : {"x", "Invoice", "Goethestrasse", "12,50"}) {
    for (std::size_t d : {1u, 2u, 96u, 300u}) {
      double n2 = 0;
      for (float x : hashed_embedding(w, d)) {
        CHECK(std::isfinite(x));
        n2 += double{x} * x;
      }
      CHECK(std::sqrt(n2) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(hashed_embedding("x", 0), EmbeddingError);
}

TEST_CASE("wordgrid fills word rectangles with the embedding") {
  const HashedEmbedding provider(kCfg.embed_dim);
  const Grid empty = build_wordgrid({}, kA4, kCfg, provider);
  CHECK(empty.dims() == std::vector<std::uint32_t>{364, 256, 96});
  CHECK(std::all_of(empty.f32_data().begin(), empty.f32_data().end(), [](float v) { return v == 0.0f; }));

  const Word w = word("Invoice", 100, 100, 142, 107.86, 0);
  const Grid g = build_wordgrid({w}, kA4, kCfg, provider);
  const CellRect r = to_cell(w.box, kA4, kCfg);
  const auto vec = provider.lookup("Invoice");
  std::size_t bad = 0;
  for (std::uint32_t y = 0; y < kCfg.height; ++y) {
    for (std::uint32_t x = 0; x < kCfg.width; ++x) {
      const bool inside = y >= r.r0 && y < r.r1 && x >= r.c0 && x < r.c1;
      for (std::uint32_t k = 0; k < kCfg.embed_dim; ++k) {
        const float v = g.f32_data()[g.offset(y, x, k)];
        if (v != (inside ? vec[k] : 0.0f)) ++bad;
      }
    }
  }
  CHECK(bad == 0);
}

TEST_CASE("wordgrid rejects a provider of the wrong dimension") {
  const HashedEmbedding provider(8);
  CHECK_THROWS_AS(build_wordgrid({word("a", 1, 1, 5, 5, 0)}, kA4, kCfg, provider), EmbeddingError);
}

TEST_CASE("sidecar embeddings") {
  const std::string bytes = encode_embedding_sidecar(3, {{"Invoice", {1, 0, 0}}, {"€", {0, 0.5f, -2}}});
  // header 4 + 4 + 4, records 2 + 7 + 12 and 2 + 3 + 12
  CHECK(bytes.size() == 12 + 21 + 17);
  CHECK(bytes.substr(0, 4) == "EMBD");
  const auto emb = SidecarEmbedding::parse(bytes);
  CHECK(emb.dim() == 3);
  CHECK(emb.entries() == 2);
  CHECK(emb.lookup("€") == std::vector<float>{0, 0.5f, -2});
  CHECK_THROWS_AS(emb.lookup("missing"), EmbeddingError);
  CHECK_THROWS_AS(SidecarEmbedding::parse("EMBX" + bytes.substr(4)), EmbeddingError);
  CHECK_THROWS_AS(SidecarEmbedding::parse(bytes.substr(0, bytes.size() - 1)), EmbeddingError);

  GridConfig cfg;
  cfg.embed_dim = 3;
  try {
    build_wordgrid({word("Unknown", 1, 1, 5, 5, 0)}, kA4, cfg, emb);
    FAIL("expected EmbeddingError");
  } catch (const EmbeddingError& e) {
    CHECK(std::string(e.what()).find("Unknown") != std::string::npos);
  }
}

TEST_CASE("sidecar rejects non-finite vectors") {
  const std::string bytes = encode_embedding_sidecar(1, {{"x", {NAN}}});
  CHECK_THROWS_AS(SidecarEmbedding::parse(bytes), EmbeddingError);
}

TEST_CASE("page_to_grid scales continuously") {
  const BBox g = page_to_grid(BBox(0, 0, 595, 842), kA4, kCfg);
  CHECK(g == BBox(0, 0, 256, 364));
}
