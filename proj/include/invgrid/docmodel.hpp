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

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace invgrid {

/// Axis-aligned rectangle. Coordinates are PDF points with the origin at the
/// top-left of the page and y growing downward. The same type carries grid
/// coordinates (columns, rows) where noted.
struct BBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  BBox() = default;
  // Checked: rejects non-finite or zero/negative-area boxes.
  BBox(double x0_, double y0_, double x1_, double y1_);

  // Bypasses the invariant check. Used when reading untrusted data that is
  // reported on rather than rejected (see validate_annotation).
  static BBox unchecked(double x0, double y0, double x1, double y1) noexcept;

  bool valid() const noexcept;
  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  double area() const noexcept { return width() * height(); }
  double cx() const noexcept { return 0.5 * (x0 + x1); }
  double cy() const noexcept { return 0.5 * (y0 + y1); }
  bool contains(const BBox& inner, double eps = 1e-9) const noexcept;
  bool intersects(const BBox& other) const noexcept;

  friend bool operator==(const BBox&, const BBox&) = default;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double intersection_area(const BBox& a, const BBox& b) noexcept;
double iou(const BBox& a, const BBox& b) noexcept;
// Fraction of `word_box` that lies inside `region`.
double overlap_fraction(const BBox& word_box, const BBox& region) noexcept;
BBox bounding_union(const BBox& a, const BBox& b) noexcept;

struct Word {
  std::string text;
  BBox box;
  std::uint32_t reading_order = 0;

  friend bool operator==(const Word&, const Word&) = default;
};

enum class FieldLabel : std::uint8_t {
  CompanyName,
  CompanyAddress,
  InvoiceNumber,
  InvoiceAmount,
  InvoiceDate,
  ItemName,
  ItemQuantity,
  ItemAmount,
};

inline constexpr std::size_t kFieldCount = 8;
inline constexpr std::array<FieldLabel, kFieldCount> kAllFields = {
    FieldLabel::CompanyName, FieldLabel::CompanyAddress, FieldLabel::InvoiceNumber,
    FieldLabel::InvoiceAmount, FieldLabel::InvoiceDate, FieldLabel::ItemName,
    FieldLabel::ItemQuantity, FieldLabel::ItemAmount,
};

constexpr std::size_t field_index(FieldLabel label) noexcept {
  return static_cast<std::size_t>(label);
}
constexpr bool is_line_item(FieldLabel label) noexcept {
  return label == FieldLabel::ItemName || label == FieldLabel::ItemQuantity ||
         label == FieldLabel::ItemAmount;
}
std::string_view to_string(FieldLabel label) noexcept;
// Throws std::invalid_argument for unknown names.
FieldLabel parse_field_label(std::string_view name);

struct FieldInstance {
  FieldLabel label = FieldLabel::CompanyName;
  std::string value;
  std::vector<BBox> boxes;
  std::optional<std::uint32_t> row;

  // Bounding rectangle of all boxes.
  BBox envelope() const;

  friend bool operator==(const FieldInstance&, const FieldInstance&) = default;
};

struct PageSize {
  double width = 595.0;
  double height = 842.0;

  BBox bounds() const { return BBox(0, 0, width, height); }
  friend bool operator==(const PageSize&, const PageSize&) = default;
};

struct DocumentAnnotation {
  std::string doc_id;
  PageSize page;
  std::vector<Word> words;
  std::vector<FieldInstance> fields;
  std::string template_id;
  std::uint64_t seed = 0;

  friend bool operator==(const DocumentAnnotation&, const DocumentAnnotation&) = default;
};

struct Violation {
  std::string invariant;  // short machine-readable tag, e.g. "box-degenerate"
  std::string element;    // offending element, e.g. "words[3]" or "fields[2].boxes[0]"
  std::string detail;
};

// Empty iff every DocumentAnnotation invariant holds.
std::vector<Violation> validate_annotation(const DocumentAnnotation& doc);

// Words whose boxes lie inside any of `boxes`, joined by single spaces in
// reading order.
std::string text_under(const std::vector<BBox>& boxes, const std::vector<Word>& words);

// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

// JSON schema: see docs/formats.md.
nlohmann::json to_json(const DocumentAnnotation& doc);
DocumentAnnotation annotation_from_json(const nlohmann::json& j);
std::string serialize_annotation(const DocumentAnnotation& doc);
DocumentAnnotation parse_annotation(std::string_view text);

nlohmann::json box_to_json(const BBox& b);
BBox box_from_json(const nlohmann::json& j);

}  // namespace invgrid
