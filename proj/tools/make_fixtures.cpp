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


// Writes the frozen fixtures: golden/ and tests/fixtures/currency_clip/.
// Usage: invgrid_fixtures [repo_root]

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <json.hpp>

#include "invgrid/corpus.hpp"
#include "invgrid/gridify.hpp"
#include "invgrid/layout.hpp"
#include "invgrid/recordgen.hpp"
#include "invgrid/render.hpp"
#include "invgrid/rng.hpp"
#include "invgrid/targets.hpp"
#include "invgrid/tensorio.hpp"
#include "invgrid/utf8.hpp"

namespace fs = std::filesystem;
using namespace invgrid;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  write_file_atomic(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

void write_golden(const fs::path& root) {
  const Lexicons lex = load_lexicons(default_lexicon_dir());
  const InvoiceRecord rec = synth_record(42, lex);
  write_text(root / "golden" / "record_42.json", to_json(rec).dump(1) + "\n");

  const Template t01 = load_template(default_template_dir() / "t01.json");
  const RenderedDocument doc = emit_pdf(instantiate(rec, t01, 42), "doc-42");
  write_text(root / "golden" / "doc_42.pdf", doc.pdf);

  // 2x3x4 f32 with values (i - 12) / 4 in row-major order.
  Grid conf = Grid::f32({2, 3, 4});
  auto data = conf.f32_data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = (static_cast<float>(i) - 12.0f) / 4.0f;
  write_text(root / "golden" / "conformance.t", encode_tensor(conf));

  nlohmann::json emb = {{"word", "Invoice"}, {"dim", 96}, {"vector", hashed_embedding("Invoice", 96)}};
  write_text(root / "golden" / "hashed_invoice.json", emb.dump(1) + "\n");
}

PlacedText run(const std::string& text, double x0, double y0, FieldLabel label, std::size_t element,
               std::optional<std::uint32_t> row = std::nullopt) {
  const FontMetric& f = courier();
  const double fs = 10;
  const double width = f.text_width(utf8::length(text), fs);
  return PlacedText{text, BBox(x0, y0, x0 + width, y0 + f.line_height(fs)), label, row, fs, element};
}

// One document whose amount fields end in a currency glyph straddling grid
// column 200. The prediction mask is the ground-truth mask cut at that column,
// leaving 40% of the glyph covered.
void write_currency_clip(const fs::path& root) {
  const GridConfig grid;
  const PageSize page;
  const double cw = page.width / grid.width;
  const double amount_x0 = 200 * cw - 38.4;  // "12,50 €" at 10pt is 42pt wide

  LayoutDocument layout;
  layout.template_id = "currency-clip";
  layout.page = page;
  layout.placed = {
      run("Currency Clip Test GmbH", 60, 60, FieldLabel::CompanyName, 0),
      run("Hauptstrasse 12", 60, 80, FieldLabel::CompanyAddress, 1),
      run("10115 Berlin", 60, 93, FieldLabel::CompanyAddress, 1),
      run("INV-000042", 400, 60, FieldLabel::InvoiceNumber, 2),
      run("01.02.2023", 400, 80, FieldLabel::InvoiceDate, 3),
      run("Fixture Widget", 60, 300, FieldLabel::ItemName, 4, 0),
      run("5", 300, 300, FieldLabel::ItemQuantity, 4, 0),
      run("12,50 €", amount_x0, 300, FieldLabel::ItemAmount, 4, 0),
      run("12,50 €", amount_x0, 400, FieldLabel::InvoiceAmount, 5),
  };
  const RenderedDocument doc = emit_pdf(layout, "doc-000000");
  const fs::path dir = root / "tests" / "fixtures" / "currency_clip";
  write_text(dir / kDocumentsDir / "doc-000000.pdf", doc.pdf);
  write_text(dir / kDocumentsDir / "doc-000000.json", serialize_annotation(doc.annotation));

  Manifest m;
  m.counts = SplitCounts{0, 0, 1};
  m.templates = {layout.template_id};
  m.template_set_hash = hex64(fnv1a64(layout.template_id));
  m.lexicon_hash = hex64(0);
  m.documents = {DocumentEntry{"doc-000000", layout.template_id, 0, Split::Test}};
  fs::create_directories(dir);
  m.save(dir);
  std::cout << "wrote " << (dir / kManifestFile).string() << "\n";

  Grid pred = rasterize_semantic(doc.annotation.fields, page, grid, m.schema);
  const auto amount = m.schema.index_of(FieldLabel::InvoiceAmount);
  const auto item_amount = m.schema.index_of(FieldLabel::ItemAmount);
  auto cells = pred.u8_data();
  for (std::uint32_t r = 0; r < grid.height; ++r) {
    for (std::uint32_t c = 200; c < grid.width; ++c) {
      auto& v = cells[pred.offset(r, c)];
      if (v == amount || v == item_amount) v = m.schema.background();
    }
  }
  write_text(dir / "pred" / "doc-000000.sem.t", encode_tensor(pred));
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path(INVGRID_DATA_DIR).parent_path();
    write_golden(root);
    write_currency_clip(root);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
