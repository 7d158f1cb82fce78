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

#include <cmath>

#include "invgrid/docmodel.hpp"
#include "invgrid/rng.hpp"
#include "support.hpp"

using namespace invgrid;
using testsupport::word;

namespace {

BBox random_box(Rng& rng) {
  const double x0 = rng.unit() * 500, y0 = rng.unit() * 800;
  return BBox(x0, y0, x0 + 0.5 + rng.unit() * 90, y0 + 0.5 + rng.unit() * 40);
}

DocumentAnnotation small_doc() {
  DocumentAnnotation d;
  d.doc_id = "d1";
  d.template_id = "t";
  d.seed = 7;
  d.words = {word("Total", 10, 10, 40, 20, 0), word("12.00", 46, 10, 76, 20, 1)};
  d.fields = {FieldInstance{FieldLabel::InvoiceAmount, "Total 12.00", {BBox(9, 9, 77, 21)}, std::nullopt}};
  return d;
}

}  // namespace

TEST_CASE("bbox rejects degenerate and non-finite boxes") {
  CHECK_THROWS_AS(BBox(0, 0, 0, 1), GeometryError);
  CHECK_THROWS_AS(BBox(2, 0, 1, 1), GeometryError);
  CHECK_THROWS_AS(BBox(0, 0, 1, NAN), GeometryError);
  CHECK_THROWS_AS(BBox(0, 0, INFINITY, 1), GeometryError);
  CHECK_FALSE(BBox::unchecked(2, 0, 1, 1).valid());
  CHECK(BBox(0, 0, 1, 1).valid());
}

TEST_CASE("iou examples") {
  CHECK(iou(BBox(0, 0, 2, 2), BBox(0, 0, 2, 2)) == 1.0);
  CHECK(iou(BBox(0, 0, 1, 1), BBox(5, 5, 6, 6)) == 0.0);
  CHECK(iou(BBox(0, 0, 2, 2), BBox(1, 0, 3, 2)) == doctest::Approx(2.0 / 6.0).epsilon(1e-9));
  // touching edges share no area
  CHECK(iou(BBox(0, 0, 1, 1), BBox(1, 0, 2, 1)) == 0.0);
}

TEST_CASE("iou is symmetric and exact on identity") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box(rng), b = random_box(rng);
    CHECK(iou(a, b) == iou(b, a));
    CHECK(iou(a, a) == 1.0);
    const double v = iou(a, b);
    CHECK((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("overlap_fraction examples") {
  CHECK(overlap_fraction(BBox(0, 0, 10, 10), BBox(0, 0, 5, 10)) == doctest::Approx(0.5));
  CHECK(overlap_fraction(BBox(2, 2, 3, 3), BBox(0, 0, 10, 10)) == 1.0);
  CHECK(overlap_fraction(BBox(0, 0, 10, 4), BBox(6, 0, 20, 4)) == doctest::Approx(16.0 / 40.0));
  CHECK(overlap_fraction(BBox(0, 0, 1, 1), BBox(3, 3, 4, 4)) == 0.0);
}

TEST_CASE("overlap_fraction is 1 for contained words") {
  Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const BBox outer = random_box(rng);
    const double fx = rng.unit() * 0.5, fy = rng.unit() * 0.5;
    const BBox inner(outer.x0 + fx * outer.width(), outer.y0 + fy * outer.height(),
                     outer.x1 - (0.5 - fx) * 0.5 * outer.width(), outer.y1 - (0.5 - fy) * 0.5 * outer.height());
    CHECK(overlap_fraction(inner, outer) == 1.0);
  }
}

TEST_CASE("field labels round trip by name in fixed order") {
  const char* names[] = {"company-name", "company-address", "invoice-number", "invoice-amount",
                         "invoice-date", "item-name",       "item-quantity",  "item-amount"};
  REQUIRE(kAllFields.size() == 8);
  for (std::size_t i = 0; i < kAllFields.size(); ++i) {
    CHECK(to_string(kAllFields[i]) == names[i]);
    CHECK(parse_field_label(names[i]) == kAllFields[i]);
    CHECK(field_index(kAllFields[i]) == i);
  }
  CHECK_THROWS(parse_field_label("company"));
  CHECK(is_line_item(FieldLabel::ItemName));
  CHECK_FALSE(is_line_item(FieldLabel::InvoiceAmount));
}

TEST_CASE("validate_annotation accepts a consistent document") {
  CHECK(validate_annotation(small_doc()).empty());
}

TEST_CASE("validate_annotation names a reversed box") {
  auto d = small_doc();
  d.words[1].box = BBox::unchecked(76, 10, 46, 20);
  d.fields.clear();
  const auto v = validate_annotation(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].invariant == "box-degenerate");
  CHECK(v[0].element == "words[1]");
}

TEST_CASE("validate_annotation reports a value mismatch") {
  auto d = small_doc();
  d.words[1].text = "12.01";
  const auto v = validate_annotation(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].invariant == "field-value-mismatch");
  CHECK(v[0].element == "fields[0]");
}

TEST_CASE("validate_annotation structural checks") {
  auto d = small_doc();
  d.words[1].reading_order = 0;
  d.words.push_back(word("x", 600, 10, 620, 20, 5));
  d.fields.push_back(FieldInstance{FieldLabel::ItemName, "", {}, std::nullopt});
  d.fields.push_back(FieldInstance{FieldLabel::CompanyName, "Total", {BBox(9, 9, 41, 21), BBox(20, 9, 30, 21)}, 2u});
  std::vector<std::string> tags;
  for (const auto& v : validate_annotation(d)) tags.push_back(v.invariant);
  auto has = [&](const char* t) { return std::find(tags.begin(), tags.end(), t) != tags.end(); };
  CHECK(has("reading-order-duplicate"));
  CHECK(has("box-outside-page"));
  CHECK(has("field-no-boxes"));
  CHECK(has("field-row-missing"));
  CHECK(has("field-row-unexpected"));
  CHECK(has("field-boxes-overlap"));
}

TEST_CASE("text_under joins contained words in reading order") {
  std::vector<Word> words = {word("b", 30, 0, 35, 5, 1), word("a", 0, 0, 5, 5, 0), word("c", 100, 0, 105, 5, 2)};
  CHECK(text_under({BBox(0, 0, 40, 6)}, words) == "a b");
  CHECK(text_under({BBox(0, 0, 6, 6), BBox(99, 0, 106, 6)}, words) == "a c");
  CHECK(text_under({BBox(200, 0, 210, 6)}, words).empty());
}

TEST_CASE("normalize_whitespace") {
  CHECK(normalize_whitespace("  a \t b\n\nc  ") == "a b c");
  CHECK(normalize_whitespace("") == "");
  CHECK(normalize_whitespace("   ") == "");
}

TEST_CASE("annotation JSON round trip") {
  Rng rng(3);
  for (int n = 0; n < 50; ++n) {
    DocumentAnnotation d;
    d.doc_id = "doc-" + std::to_string(n);
    d.template_id = "t0" + std::to_string(n % 10);
    d.seed = rng.next();
    const int nw = static_cast<int>(rng.uniform(0, 20));
    for (int i = 0; i < nw; ++i) {
      d.words.push_back(Word{"w" + std::to_string(i) + "€", random_box(rng), static_cast<std::uint32_t>(i)});
    }
    d.fields.push_back(FieldInstance{FieldLabel::CompanyAddress, "x y", {random_box(rng), random_box(rng)}, std::nullopt});
    d.fields.push_back(FieldInstance{FieldLabel::ItemAmount, "1,00 €", {random_box(rng)}, 3u});
    const std::string text = serialize_annotation(d);
    CHECK(parse_annotation(text) == d);
    CHECK(serialize_annotation(parse_annotation(text)) == text);
  }
}

TEST_CASE("annotation JSON uses the documented keys") {
  const auto j = to_json(small_doc());
  for (const char* k : {"doc_id", "page", "template_id", "seed", "words", "fields"}) CHECK(j.contains(k));
  CHECK(j["page"]["width"] == 595.0);
  CHECK(j["words"][0].contains("order"));
  CHECK(j["words"][0]["box"].size() == 4);
  CHECK_FALSE(j["fields"][0].contains("row"));
}

TEST_CASE("parse_annotation rejects malformed input") {
  CHECK_THROWS(parse_annotation("{"));
  CHECK_THROWS(parse_annotation("{\"doc_id\": 3}"));
  CHECK_THROWS(box_from_json(nlohmann::json::array({1, 2, 3})));
}

TEST_CASE("envelope spans all boxes") {
  FieldInstance f{FieldLabel::CompanyAddress, "", {BBox(10, 10, 50, 20), BBox(5, 30, 40, 40)}, std::nullopt};
  CHECK(f.envelope() == BBox(5, 10, 50, 40));
}
