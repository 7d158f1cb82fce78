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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "invgrid/docmodel.hpp"
#include "invgrid/font.hpp"
#include "invgrid/recordgen.hpp"

namespace invgrid {

class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TemplateError : public std::runtime_error {
 public:
  TemplateError(const std::string& source, std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

enum class Align { Left, Right };

struct Jitter {
  int dx_max = 0;
  int dy_max = 0;
};

struct TableColumn {
  double x0 = 0;
  double x1 = 0;
  Align align = Align::Left;
};

struct TemplateElement {
  enum class Kind { Field, Decoy, Table };

  Kind kind = Kind::Decoy;
  std::optional<FieldLabel> label;  // Field only
  BBox anchor;
  Jitter jitter;
  double font_size = 10;
  std::optional<std::string> static_text;  // Decoy only
  Align align = Align::Left;
  // Field only: lines of a multi-line value (the address) are stacked when
  // true, joined on one line otherwise.
  bool multiline = true;
  double line_spacing = 1.3;  // in units of font_size
  // Table only.
  double row_height = 0;
  std::map<FieldLabel, TableColumn> columns;

  std::size_t row_capacity() const;
};

struct Template {
  std::string template_id;
  PageSize page;
  std::vector<TemplateElement> elements;
};

struct PlacedText {
  std::string text;
  BBox box;
  std::optional<FieldLabel> label;
  std::optional<std::uint32_t> row;
  double font_size = 10;
  std::size_t element = 0;  // index into Template::elements

  friend bool operator==(const PlacedText&, const PlacedText&) = default;
};

struct LayoutDocument {
  std::string template_id;
  std::uint64_t seed = 0;
  PageSize page;
  std::vector<PlacedText> placed;

  friend bool operator==(const LayoutDocument&, const LayoutDocument&) = default;
};

// Field-level diagnostics; empty when the template is usable.
std::vector<std::string> validate_template(const Template& tpl, const FontMetric& font = courier());

Template template_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Template& tpl);
// Parses and validates; throws TemplateError listing every problem.
Template load_template(const std::filesystem::path& path);
// All *.json templates in `dir`, sorted by file name.
std::vector<Template> list_templates(const std::filesystem::path& dir);
std::filesystem::path default_template_dir();
std::uint64_t template_set_hash(const std::vector<Template>& templates);

// Places every extractable value of `record` (and the template's decoys) with
// per-element uniform integer jitter. Deterministic in (record, template, seed).
// Throws LayoutError on table overflow, text that does not fit its element, or
// colliding elements.
LayoutDocument instantiate(const InvoiceRecord& record, const Template& tpl, std::uint64_t seed,
                           const FontMetric& font = courier());

}  // namespace invgrid
