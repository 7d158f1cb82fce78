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

#include "invgrid/docmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace invgrid {

namespace {

std::string box_repr(const BBox& b) {
  std::ostringstream os;
  os << "(" << b.x0 << ", " << b.y0 << ", " << b.x1 << ", " << b.y1 << ")";
  return os.str();
}

constexpr std::array<std::string_view, kFieldCount> kLabelNames = {
    "company-name", "company-address", "invoice-number", "invoice-amount",
    "invoice-date", "item-name",       "item-quantity",  "item-amount",
};

}  // namespace

BBox::BBox(double x0_, double y0_, double x1_, double y1_) : x0(x0_), y0(y0_), x1(x1_), y1(y1_) {
  if (!valid()) throw GeometryError("invalid box " + box_repr(*this));
}

BBox BBox::unchecked(double x0, double y0, double x1, double y1) noexcept {
  BBox b;
  b.x0 = x0;
  b.y0 = y0;
  b.x1 = x1;
  b.y1 = y1;
  return b;
}

bool BBox::valid() const noexcept {
  return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1) &&
         x0 < x1 && y0 < y1;
}

bool BBox::contains(const BBox& inner, double eps) const noexcept {
  return inner.x0 >= x0 - eps && inner.y0 >= y0 - eps && inner.x1 <= x1 + eps &&
         inner.y1 <= y1 + eps;
}

bool BBox::intersects(const BBox& other) const noexcept {
  return intersection_area(*this, other) > 0.0;
}

double intersection_area(const BBox& a, const BBox& b) noexcept {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BBox& a, const BBox& b) noexcept {
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

double overlap_fraction(const BBox& word_box, const BBox& region) noexcept {
  if (region.contains(word_box, 0.0)) return 1.0;
  return intersection_area(word_box, region) / word_box.area();
}

BBox bounding_union(const BBox& a, const BBox& b) noexcept {
  return BBox::unchecked(std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
                         std::max(a.y1, b.y1));
}

std::string_view to_string(FieldLabel label) noexcept { return kLabelNames[field_index(label)]; }

FieldLabel parse_field_label(std::string_view name) {
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    if (kLabelNames[i] == name) return kAllFields[i];
  }
  throw std::invalid_argument("unknown field label '" + std::string(name) + "'");
}

BBox FieldInstance::envelope() const {
  if (boxes.empty()) throw GeometryError("field instance without boxes");
  BBox env = boxes.front();
  for (const auto& b : boxes) env = bounding_union(env, b);
  return env;
}

std::string text_under(const std::vector<BBox>& boxes, const std::vector<Word>& words) {
  std::vector<const Word*> hits;
  for (const auto& w : words) {
    for (const auto& b : boxes) {
      if (b.contains(w.box)) {
        hits.push_back(&w);
        break;
      }
    }
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const Word* a, const Word* b) { return a->reading_order < b->reading_order; });
  std::string out;
  for (const Word* w : hits) {
    if (!out.empty()) out += ' ';
    out += w->text;
  }
  return out;
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::vector<Violation> validate_annotation(const DocumentAnnotation& doc) {
  std::vector<Violation> out;
  auto report = [&](std::string inv, std::string elem, std::string detail) {
    out.push_back({std::move(inv), std::move(elem), std::move(detail)});
  };

  const bool page_ok = std::isfinite(doc.page.width) && std::isfinite(doc.page.height) &&
                       doc.page.width > 0 && doc.page.height > 0;
  if (!page_ok) report("page-size", "page", "page dimensions must be positive and finite");
  const BBox page = BBox::unchecked(0, 0, doc.page.width, doc.page.height);

  auto check_box = [&](const BBox& b, const std::string& elem) {
    if (!b.valid()) {
      report("box-degenerate", elem, "box " + box_repr(b) + " needs x0 < x1, y0 < y1, finite");
      return false;
    }
    if (page_ok && !page.contains(b, 0.0)) {
      report("box-outside-page", elem, "box " + box_repr(b) + " exceeds the page");
    }
    return true;
  };

  std::set<std::uint32_t> orders;
  for (std::size_t i = 0; i < doc.words.size(); ++i) {
    const auto& w = doc.words[i];
    const std::string elem = "words[" + std::to_string(i) + "]";
    if (w.text.empty()) report("word-empty", elem, "word text is empty");
    if (w.text.find('\n') != std::string::npos) report("word-newline", elem, "word contains a newline");
    check_box(w.box, elem);
    if (!orders.insert(w.reading_order).second) {
      report("reading-order-duplicate", elem,
             "reading order " + std::to_string(w.reading_order) + " used twice");
    }
  }

  for (std::size_t i = 0; i < doc.fields.size(); ++i) {
    const auto& f = doc.fields[i];
    const std::string elem = "fields[" + std::to_string(i) + "]";
    if (f.boxes.empty()) report("field-no-boxes", elem, "field has no boxes");
    if (is_line_item(f.label) && !f.row) {
      report("field-row-missing", elem, std::string(to_string(f.label)) + " requires a row index");
    }
    if (!is_line_item(f.label) && f.row) {
      report("field-row-unexpected", elem,
             std::string(to_string(f.label)) + " is a header field and must not carry a row");
    }
    bool boxes_ok = true;
    for (std::size_t k = 0; k < f.boxes.size(); ++k) {
      boxes_ok &= check_box(f.boxes[k], elem + ".boxes[" + std::to_string(k) + "]");
    }
    if (!boxes_ok) continue;
    for (std::size_t a = 0; a < f.boxes.size(); ++a) {
      for (std::size_t b = a + 1; b < f.boxes.size(); ++b) {
        if (f.boxes[a].intersects(f.boxes[b])) {
          report("field-boxes-overlap", elem,
                 "boxes " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
        }
      }
    }
    const std::string under = text_under(f.boxes, doc.words);
    if (under != f.value) {
      report("field-value-mismatch", elem,
             "value '" + f.value + "' but words under its boxes read '" + under + "'");
    }
  }
  return out;
}

nlohmann::json box_to_json(const BBox& b) { return nlohmann::json::array({b.x0, b.y0, b.x1, b.y1}); }

BBox box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw std::invalid_argument("box must be an array of 4 numbers");
  }
  return BBox::unchecked(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
                         j.at(3).get<double>());
}

nlohmann::json to_json(const DocumentAnnotation& doc) {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : doc.words) {
    words.push_back({{"text", w.text}, {"box", box_to_json(w.box)}, {"order", w.reading_order}});
  }
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : doc.fields) {
    nlohmann::json jf = {{"label", std::string(to_string(f.label))}, {"value", f.value}};
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : f.boxes) boxes.push_back(box_to_json(b));
    jf["boxes"] = std::move(boxes);
    if (f.row) jf["row"] = *f.row;
    fields.push_back(std::move(jf));
  }
  return {
      {"doc_id", doc.doc_id},
      {"page", {{"width", doc.page.width}, {"height", doc.page.height}}},
      {"template_id", doc.template_id},
      {"seed", doc.seed},
      {"words", std::move(words)},
      {"fields", std::move(fields)},
  };
}

DocumentAnnotation annotation_from_json(const nlohmann::json& j) {
  DocumentAnnotation doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  doc.page.width = j.at("page").at("width").get<double>();
  doc.page.height = j.at("page").at("height").get<double>();
  doc.template_id = j.at("template_id").get<std::string>();
  doc.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& jw : j.at("words")) {
    doc.words.push_back({jw.at("text").get<std::string>(), box_from_json(jw.at("box")),
                         jw.at("order").get<std::uint32_t>()});
  }
  for (const auto& jf : j.at("fields")) {
    FieldInstance f;
    f.label = parse_field_label(jf.at("label").get<std::string>());
    f.value = jf.at("value").get<std::string>();
    for (const auto& jb : jf.at("boxes")) f.boxes.push_back(box_from_json(jb));
    if (jf.contains("row")) f.row = jf.at("row").get<std::uint32_t>();
    doc.fields.push_back(std::move(f));
  }
  return doc;
}

std::string serialize_annotation(const DocumentAnnotation& doc) { return to_json(doc).dump(1) + "\n"; }

DocumentAnnotation parse_annotation(std::string_view text) {
  return annotation_from_json(nlohmann::json::parse(text));
}

}  // namespace invgrid
