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

#include <cstring>

#include "invgrid/rng.hpp"
#include "invgrid/tensorio.hpp"
#include "support.hpp"

using namespace invgrid;

namespace {

TensorError::Kind kind_of(std::string_view bytes) {
  try {
    decode_tensor(bytes);
  } catch (const TensorError& e) {
    return e.kind();
  }
  FAIL("expected TensorError");
  return TensorError::Kind::Io;
}

std::string hex(const std::string& s) {
  static const char* d = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    out += d[c >> 4];
    out += d[c & 15];
  }
  return out;
}

}  // namespace

TEST_CASE("2x3 u8 tensor is a 22-byte file") {
  Grid g = Grid::u8({2, 3});
  for (std::uint8_t i = 0; i < 6; ++i) g.u8_data()[i] = i;
  const std::string bytes = encode_tensor(g);
  CHECK(bytes.size() == 4 + 2 + 1 + 1 + 8 + 6);
  CHECK(hex(bytes) == "47524454" "0100" "00" "02" "02000000" "03000000" "000102030405");
}

TEST_CASE("f32 payload is little-endian IEEE 754") {
  Grid g = Grid::f32({2});
  g.f32_data()[0] = 1.0f;
  g.f32_data()[1] = -2.5f;
  CHECK(hex(encode_tensor(g)) == "47524454" "0100" "01" "01" "02000000" "0000803f" "000020c0");
}

TEST_CASE("1000 random tensors round trip") {
  Rng rng(1000);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::uint32_t> dims(static_cast<std::size_t>(rng.uniform(0, 4)));
    for (auto& d : dims) d = static_cast<std::uint32_t>(rng.uniform(0, 7));
    Grid g;
    if (rng.chance(0.5)) {
      g = Grid::u8(dims);
      for (auto& v : g.u8_data()) v = static_cast<std::uint8_t>(rng.next());
    } else {
      g = Grid::f32(dims);
      for (auto& v : g.f32_data()) {
        const auto bits = static_cast<std::uint32_t>(rng.next());
        std::memcpy(&v, &bits, 4);
      }
    }
    const std::string bytes = encode_tensor(g);
    CHECK(bytes.size() == 8 + 4 * dims.size() + g.byte_size());
    const Grid back = decode_tensor(bytes);
    CHECK(back.dims() == g.dims());
    CHECK(back.dtype() == g.dtype());
    CHECK(encode_tensor(back) == bytes);
  }
}

TEST_CASE("decode errors are distinct") {
  Grid g = Grid::u8({2, 3}, 7);
  const std::string ok = encode_tensor(g);
  CHECK(kind_of("") == TensorError::Kind::Truncated);
  CHECK(kind_of(ok.substr(0, 6)) == TensorError::Kind::Truncated);
  CHECK(kind_of(ok.substr(0, 12)) == TensorError::Kind::Truncated);
  CHECK(kind_of(ok.substr(0, ok.size() - 1)) == TensorError::Kind::Truncated);
  CHECK(kind_of(ok + "x") == TensorError::Kind::TrailingBytes);
  std::string bad = ok;
  bad[0] = 'X';
  CHECK(kind_of(bad) == TensorError::Kind::BadMagic);
  bad = ok;
  bad[4] = 2;
  CHECK(kind_of(bad) == TensorError::Kind::BadVersion);
  bad = ok;
  bad[6] = 3;
  CHECK(kind_of(bad) == TensorError::Kind::BadDType);
  // dims whose product exceeds any file: truncation, not allocation failure
  bad = ok;
  for (int i = 8; i < 16; ++i) bad[static_cast<std::size_t>(i)] = static_cast<char>(0xFF);
  CHECK(kind_of(bad) == TensorError::Kind::Truncated);
}

TEST_CASE("writes are atomic and leave no temp files") {
  testsupport::TempDir dir("tio");
  Grid a = Grid::f32({3, 4}, 1.5f);
  write_tensor(dir / "x.t", a);
  CHECK(read_tensor(dir / "x.t") == a);
  Grid b = Grid::u8({5}, 9);
  write_tensor(dir / "x.t", b);
  CHECK(read_tensor(dir / "x.t") == b);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
  try {
    read_tensor(dir / "missing.t");
    FAIL("expected TensorError");
  } catch (const TensorError& e) {
    CHECK(e.kind() == TensorError::Kind::Io);
  }
  CHECK_THROWS_AS(write_tensor(dir / "no" / "such" / "dir" / "x.t", a), TensorError);
}

TEST_CASE("conformance fixture") {
  const std::string bytes = testsupport::slurp(testsupport::source_dir() / "golden" / "conformance.t");
  REQUIRE(bytes.size() == 8 + 12 + 96);
  const Grid g = decode_tensor(bytes);
  CHECK(g.dims() == std::vector<std::uint32_t>{2, 3, 4});
  CHECK(g.dtype() == DType::F32);
  for (std::size_t i = 0; i < 24; ++i) CHECK(g.f32_data()[i] == (static_cast<float>(i) - 12.0f) / 4.0f);
  CHECK(g.f32_data()[g.offset(1, 2, 3)] == 2.75f);
  CHECK(encode_tensor(g) == bytes);
}
