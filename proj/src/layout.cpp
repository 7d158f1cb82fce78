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

#include "invgrid/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "invgrid/rng.hpp"
#include "invgrid/utf8.hpp"

namespace invgrid {

namespace {

constexpr std::uint64_t kJitterStream = 0x1A70;
constexpr double kEps = 1e-9;

std::string join_diagnostics(const std::string& source, const std::vector<std::string>& diags) {
  std::string msg = "invalid template " + source + ":";
  for (const auto& d : diags) msg += "\n  " + d;
  return msg;
}

std::string element_name(std::size_t i, const TemplateElement& e) {
  std::string name = "elements[" + std::to_string(i) + "]";
  if (e.label) name += " (" + std::string(to_string(*e.label)) + ")";
  return name;
}

Align parse_align(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return Align::Left;
  const auto s = j.at(key).get<std::string>();
  if (s == "left") return Align::Left;
  if (s == "right") return Align::Right;
  throw std::invalid_argument(std::string(key) + " must be 'left' or 'right', got '" + s + "'");
}

const char* align_name(Align a) { return a == Align::Left ? "left" : "right"; }

// Box of a single-line run placed in [x0, x1] at top `y`.
BBox place_run(std::size_t glyphs, double font_size, double x0, double x1, double y, Align align,
               const FontMetric& font) {
  const double w = font.text_width(glyphs, font_size);
  const double h = font.line_height(font_size);
  const double left = align == Align::Left ? x0 : x1 - w;
  return BBox(left, y, left + w, y + h);
}

}  // namespace

TemplateError::TemplateError(const std::string& source, std::vector<std::string> diagnostics)
    : std::runtime_error(join_diagnostics(source, diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::size_t TemplateElement::row_capacity() const {
  if (kind != Kind::Table || row_height <= 0) return 0;
  return static_cast<std::size_t>(std::floor(anchor.height() / row_height + kEps));
}

std::vector<std::string> validate_template(const Template& tpl, const FontMetric& font) {
  std::vector<std::string> diags;
  if (tpl.template_id.empty()) diags.push_back("template_id: must not be empty");
  if (!(tpl.page.width > 0 && tpl.page.height > 0)) diags.push_back("page: width and height must be positive");

  std::map<FieldLabel, std::size_t> header_counts;
  std::size_t tables = 0;
  for (std::size_t i = 0; i < tpl.elements.size(); ++i) {
    const auto& e = tpl.elements[i];
    const std::string name = element_name(i, e);
    if (!e.anchor.valid()) {
      diags.push_back(name + ".anchor: needs x0 < x1 and y0 < y1");
      continue;
    }
    if (e.jitter.dx_max < 0 || e.jitter.dy_max < 0) diags.push_back(name + ".jitter: must be non-negative");
    if (e.anchor.x0 - e.jitter.dx_max < 0 || e.anchor.y0 - e.jitter.dy_max < 0 ||
        e.anchor.x1 + e.jitter.dx_max > tpl.page.width ||
        e.anchor.y1 + e.jitter.dy_max > tpl.page.height) {
      diags.push_back(name + ".anchor: anchor plus maximal jitter leaves the page");
    }
    if (!(e.font_size > 0)) diags.push_back(name + ".font_size: must be positive");
    if (font.line_height(e.font_size) > e.anchor.height() + kEps) {
      diags.push_back(name + ".anchor: shorter than one line of text");
    }
    switch (e.kind) {
      case TemplateElement::Kind::Field:
        if (!e.label) {
          diags.push_back(name + ".label: field element needs a label");
        } else if (is_line_item(*e.label)) {
          diags.push_back(name + ".label: line-item labels belong in a table element");
        } else {
          ++header_counts[*e.label];
        }
        if (!(e.line_spacing >= 1.0)) diags.push_back(name + ".line_spacing: must be at least 1.0");
        break;
      case TemplateElement::Kind::Decoy:
        if (!e.static_text || e.static_text->empty()) {
          diags.push_back(name + ".static_text: decoy element needs text");
        }
        break;
      case TemplateElement::Kind::Table: {
        ++tables;
        if (!(e.row_height >= font.line_height(e.font_size))) {
          diags.push_back(name + ".row_height: must be at least one line height");
        }
        if (e.row_capacity() == 0) diags.push_back(name + ".anchor: table holds no rows");
        for (FieldLabel label : {FieldLabel::ItemName, FieldLabel::ItemQuantity, FieldLabel::ItemAmount}) {
          auto it = e.columns.find(label);
          if (it == e.columns.end()) {
            diags.push_back(name + ".columns: missing column " + std::string(to_string(label)));
            continue;
          }
          const auto& col = it->second;
          if (!(col.x0 < col.x1) || col.x0 < e.anchor.x0 || col.x1 > e.anchor.x1) {
            diags.push_back(name + ".columns." + std::string(to_string(label)) +
                            ": must be a non-empty span inside the anchor");
          }
        }
        std::vector<TableColumn> spans;
        for (const auto& [label, col] : e.columns) spans.push_back(col);
        std::sort(spans.begin(), spans.end(), [](auto& a, auto& b) { return a.x0 < b.x0; });
        for (std::size_t k = 1; k < spans.size(); ++k) {
          if (spans[k].x0 < spans[k - 1].x1) diags.push_back(name + ".columns: column spans overlap");
        }
        break;
      }
    }
  }
  for (FieldLabel label : kAllFields) {
    if (is_line_item(label)) continue;
    const auto n = header_counts[label];
    if (n != 1) {
      diags.push_back("elements: expected exactly one field element for " + std::string(to_string(label)) +
                      ", found " + std::to_string(n));
    }
  }
  if (tables != 1) diags.push_back("elements: expected exactly one table element, found " + std::to_string(tables));
  return diags;
}

Template template_from_json(const nlohmann::json& j) {
  Template tpl;
  tpl.template_id = j.at("template_id").get<std::string>();
  if (j.contains("page")) {
    tpl.page.width = j.at("page").at("width").get<double>();
    tpl.page.height = j.at("page").at("height").get<double>();
  }
  for (const auto& je : j.at("elements")) {
    TemplateElement e;
    const auto kind = je.at("kind").get<std::string>();
    if (kind == "field") {
      e.kind = TemplateElement::Kind::Field;
      e.label = parse_field_label(je.at("label").get<std::string>());
    } else if (kind == "decoy") {
      e.kind = TemplateElement::Kind::Decoy;
      e.static_text = je.at("static_text").get<std::string>();
    } else if (kind == "table") {
      e.kind = TemplateElement::Kind::Table;
      e.row_height = je.at("row_height").get<double>();
      for (const auto& [name, jc] : je.at("columns").items()) {
        e.columns[parse_field_label(name)] = {jc.at("x0").get<double>(), jc.at("x1").get<double>(),
                                              parse_align(jc, "align")};
      }
    } else {
      throw std::invalid_argument("unknown element kind '" + kind + "'");
    }
    e.anchor = box_from_json(je.at("anchor"));
    if (je.contains("jitter")) {
      e.jitter.dx_max = je.at("jitter").at("dx").get<int>();
      e.jitter.dy_max = je.at("jitter").at("dy").get<int>();
    }
    e.font_size = je.value("font_size", 10.0);
    e.align = parse_align(je, "align");
    e.multiline = je.value("multiline", true);
    e.line_spacing = je.value("line_spacing", 1.3);
    tpl.elements.push_back(std::move(e));
  }
  return tpl;
}

nlohmann::json to_json(const Template& tpl) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& e : tpl.elements) {
    nlohmann::json je = {{"anchor", box_to_json(e.anchor)},
                         {"jitter", {{"dx", e.jitter.dx_max}, {"dy", e.jitter.dy_max}}},
                         {"font_size", e.font_size},
                         {"align", align_name(e.align)}};
    switch (e.kind) {
      case TemplateElement::Kind::Field:
        je["kind"] = "field";
        je["label"] = std::string(to_string(*e.label));
        je["multiline"] = e.multiline;
        je["line_spacing"] = e.line_spacing;
        break;
      case TemplateElement::Kind::Decoy:
        je["kind"] = "decoy";
        je["static_text"] = *e.static_text;
        break;
      case TemplateElement::Kind::Table: {
        je["kind"] = "table";
        je["row_height"] = e.row_height;
        nlohmann::json cols = nlohmann::json::object();
        for (const auto& [label, col] : e.columns) {
          cols[std::string(to_string(label))] = {{"x0", col.x0}, {"x1", col.x1}, {"align", align_name(col.align)}};
        }
        je["columns"] = std::move(cols);
        break;
      }
    }
    elements.push_back(std::move(je));
  }
  return {{"template_id", tpl.template_id},
          {"page", {{"width", tpl.page.width}, {"height", tpl.page.height}}},
          {"elements", std::move(elements)}};
}

Template load_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TemplateError(path.string(), {"file cannot be read"});
  Template tpl;
  try {
    tpl = template_from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    throw TemplateError(path.string(), {std::string("schema: ") + e.what()});
  }
  auto diags = validate_template(tpl);
  if (!diags.empty()) throw TemplateError(path.string(), std::move(diags));
  return tpl;
}

std::vector<Template> list_templates(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw TemplateError(dir.string(), {"template directory does not exist"});
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Template> out;
  for (const auto& f : files) out.push_back(load_template(f));
  return out;
}

std::filesystem::path default_template_dir() {
  if (const char* env = std::getenv("INVGRID_TEMPLATE_DIR"); env && *env) return env;
  return INVGRID_TEMPLATE_DIR;
}

std::uint64_t template_set_hash(const std::vector<Template>& templates) {
  std::uint64_t h = fnv1a64("");
  for (const auto& t : templates) h = fnv1a64(to_json(t).dump() + "\n", h);
  return h;
}

LayoutDocument instantiate(const InvoiceRecord& record, const Template& tpl, std::uint64_t seed,
                           const FontMetric& font) {
  LayoutDocument doc;
  doc.template_id = tpl.template_id;
  doc.seed = seed;
  doc.page = tpl.page;

  const auto values = record_to_field_values(record);
  Rng rng(mix_seed(seed, kJitterStream));

  auto fit_error = [&](std::size_t i, const std::string& text) {
    return LayoutError("template " + tpl.template_id + ": text '" + text + "' does not fit " +
                       element_name(i, tpl.elements[i]));
  };

  for (std::size_t i = 0; i < tpl.elements.size(); ++i) {
    const auto& e = tpl.elements[i];
    const double dx = static_cast<double>(rng.uniform(-e.jitter.dx_max, e.jitter.dx_max));
    const double dy = static_cast<double>(rng.uniform(-e.jitter.dy_max, e.jitter.dy_max));
    const BBox region(e.anchor.x0 + dx, e.anchor.y0 + dy, e.anchor.x1 + dx, e.anchor.y1 + dy);

    auto place_lines = [&](const std::vector<std::string>& lines, std::optional<FieldLabel> label) {
      const double pitch = e.line_spacing * e.font_size;
      for (std::size_t k = 0; k < lines.size(); ++k) {
        const BBox box = place_run(utf8::length(lines[k]), e.font_size, region.x0, region.x1,
                                   region.y0 + static_cast<double>(k) * pitch, e.align, font);
        if (!region.contains(box)) throw fit_error(i, lines[k]);
        doc.placed.push_back({lines[k], box, label, std::nullopt, e.font_size, i});
      }
    };

    switch (e.kind) {
      case TemplateElement::Kind::Decoy:
        place_lines({*e.static_text}, std::nullopt);
        break;
      case TemplateElement::Kind::Field: {
        const FieldLabel label = *e.label;
        if (label == FieldLabel::CompanyAddress && e.multiline) {
          place_lines(record.company_address, label);
        } else {
          place_lines({values.at(label).front()}, label);
        }
        break;
      }
      case TemplateElement::Kind::Table: {
        const auto rows = record.line_items.size();
        if (rows > e.row_capacity()) {
          throw LayoutError("template " + tpl.template_id + ": " + std::to_string(rows) +
                            " line items exceed table capacity of " + std::to_string(e.row_capacity()));
        }
        for (std::size_t r = 0; r < rows; ++r) {
          const double y = region.y0 + static_cast<double>(r) * e.row_height;
          for (const auto& [label, col] : e.columns) {
            const std::string& text = values.at(label).at(r);
            const BBox box =
                place_run(utf8::length(text), e.font_size, col.x0 + dx, col.x1 + dx, y, col.align, font);
            if (box.x0 < col.x0 + dx - kEps || box.x1 > col.x1 + dx + kEps || !region.contains(box)) {
              throw fit_error(i, text);
            }
            doc.placed.push_back({text, box, label, static_cast<std::uint32_t>(r), e.font_size, i});
          }
        }
        break;
      }
    }
  }

  // Elements may not overlap one another, including their line gaps.
  std::map<std::size_t, BBox> envelopes;
  for (const auto& p : doc.placed) {
    auto [it, fresh] = envelopes.try_emplace(p.element, p.box);
    if (!fresh) it->second = bounding_union(it->second, p.box);
  }
  for (auto a = envelopes.begin(); a != envelopes.end(); ++a) {
    for (auto b = std::next(a); b != envelopes.end(); ++b) {
      if (a->second.intersects(b->second)) {
        throw LayoutError("template " + tpl.template_id + ": " + element_name(a->first, tpl.elements[a->first]) +
                          " collides with " + element_name(b->first, tpl.elements[b->first]) +
                          " (seed " + std::to_string(seed) + ")");
      }
    }
  }
  return doc;
}

}  // namespace invgrid
