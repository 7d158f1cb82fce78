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

#include "invgrid/render.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "invgrid/rng.hpp"
#include "invgrid/utf8.hpp"

namespace invgrid {

namespace {

// WinAnsiEncoding 0x80-0x9F; zero marks an unused slot.
constexpr std::array<char32_t, 32> kWinAnsiHigh = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0,      0x017D, 0,      0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178,
};

std::string format_number(double v) {
  if (std::abs(v) < 5e-5) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  std::string s(buf, res.ptr);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string codepoint_name(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

// PDF literal string body for `text`, WinAnsi-encoded.
std::string pdf_string(std::string_view text) {
  std::vector<char32_t> cps;
  try {
    cps = utf8::decode(text);
  } catch (const std::invalid_argument& e) {
    throw RenderError("text '" + std::string(text) + "': " + e.what());
  }
  std::string out;
  for (char32_t cp : cps) {
    auto byte = win_ansi_byte(cp);
    if (!byte) {
      throw RenderError("unprintable character " + codepoint_name(cp) + " in text '" + std::string(text) + "'");
    }
    const unsigned char b = *byte;
    if (b == '(' || b == ')' || b == '\\') {
      out += '\\';
      out += static_cast<char>(b);
    } else if (b >= 0x80) {
      char oct[5];
      std::snprintf(oct, sizeof oct, "\\%03o", b);
      out += oct;
    } else {
      out += static_cast<char>(b);
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long long parse_int(std::string_view field, std::size_t line, const char* column) {
  long long v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw OcrParseError(line, std::string("column '") + column + "' is not an integer: '" + std::string(field) + "'");
  }
  return v;
}

double parse_double(std::string_view field, std::size_t line, const char* column) {
  double v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw OcrParseError(line, std::string("column '") + column + "' is not a number: '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

}  // namespace

std::optional<unsigned char> win_ansi_byte(char32_t cp) noexcept {
  if (cp >= 0x20 && cp <= 0x7E) return static_cast<unsigned char>(cp);
  if (cp >= 0xA0 && cp <= 0xFF) return static_cast<unsigned char>(cp);
  for (std::size_t i = 0; i < kWinAnsiHigh.size(); ++i) {
    if (kWinAnsiHigh[i] != 0 && kWinAnsiHigh[i] == cp) return static_cast<unsigned char>(0x80 + i);
  }
  return std::nullopt;
}

RenderedDocument emit_pdf(const LayoutDocument& layout, const std::string& doc_id, const FontMetric& font) {
  RenderedDocument out;
  auto& ann = out.annotation;
  ann.doc_id = doc_id;
  ann.page = layout.page;
  ann.template_id = layout.template_id;
  ann.seed = layout.seed;

  std::string content;
  struct PendingWord {
    std::string text;
    BBox box;
    std::size_t sequence;
  };
  std::vector<PendingWord> words;

  for (const auto& run : layout.placed) {
    const std::string encoded = pdf_string(run.text);
    const double baseline = layout.page.height - (run.box.y0 + font.ascent * run.font_size);
    content += "BT /F1 " + format_number(run.font_size) + " Tf " + format_number(run.box.x0) + " " +
               format_number(baseline) + " Td (" + encoded + ") Tj ET\n";

    const auto glyphs = utf8::decode(run.text);
    std::size_t start = 0;
    while (start < glyphs.size()) {
      if (glyphs[start] == U' ') {
        ++start;
        continue;
      }
      std::size_t end = start;
      while (end < glyphs.size() && glyphs[end] != U' ') ++end;
      // Byte offsets for the substring.
      std::size_t byte_start = 0, byte_end = 0, cp_index = 0;
      for (std::size_t b = 0; b <= run.text.size(); ++b) {
        const bool boundary = b == run.text.size() || (static_cast<unsigned char>(run.text[b]) & 0xC0) != 0x80;
        if (!boundary) continue;
        if (cp_index == start) byte_start = b;
        if (cp_index == end) {
          byte_end = b;
          break;
        }
        ++cp_index;
      }
      const double x0 = run.box.x0 + font.text_width(start, run.font_size);
      const double x1 = end == glyphs.size() ? run.box.x1 : run.box.x0 + font.text_width(end, run.font_size);
      words.push_back({run.text.substr(byte_start, byte_end - byte_start), BBox(x0, run.box.y0, x1, run.box.y1),
                       words.size()});
      start = end;
    }
  }

  std::stable_sort(words.begin(), words.end(), [](const PendingWord& a, const PendingWord& b) {
    return std::tie(a.box.y0, a.box.x0) < std::tie(b.box.y0, b.box.x0);
  });
  for (std::size_t i = 0; i < words.size(); ++i) {
    ann.words.push_back({words[i].text, words[i].box, static_cast<std::uint32_t>(i)});
  }

  // One FieldInstance per (element, label, row), in placement order.
  std::vector<std::tuple<std::size_t, FieldLabel, std::optional<std::uint32_t>>> keys;
  for (const auto& run : layout.placed) {
    if (!run.label) continue;
    const auto key = std::make_tuple(run.element, *run.label, run.row);
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      ann.fields.push_back({*run.label, run.text, {run.box}, run.row});
    } else {
      auto& f = ann.fields[static_cast<std::size_t>(it - keys.begin())];
      f.value += " " + run.text;
      f.boxes.push_back(run.box);
    }
  }

  // Fixed object layout: catalog, pages, page, font, content stream.
  std::vector<std::string> objects = {
      "<< /Type /Catalog /Pages 2 0 R >>",
      "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
      "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 " + format_number(layout.page.width) + " " +
          format_number(layout.page.height) + "] /Resources << /Font << /F1 4 0 R >> >> /Contents 5 0 R >>",
      "<< /Type /Font /Subtype /Type1 /BaseFont /" + font.name + " /Encoding /WinAnsiEncoding >>",
      "<< /Length " + std::to_string(content.size()) + " >>\nstream\n" + content + "\nendstream",
  };
  std::string& pdf = out.pdf;
  pdf = "%PDF-1.4\n%\xE2\xE3\xCF\xD3\n";
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    offsets.push_back(pdf.size());
    pdf += std::to_string(i + 1) + " 0 obj\n" + objects[i] + "\nendobj\n";
  }
  const std::size_t xref = pdf.size();
  pdf += "xref\n0 " + std::to_string(objects.size() + 1) + "\n0000000000 65535 f \n";
  for (std::size_t off : offsets) {
    char entry[24];
    std::snprintf(entry, sizeof entry, "%010zu 00000 n \n", off);
    pdf += entry;
  }
  const std::string id = hex64(fnv1a64(content)) + hex64(fnv1a64(layout.template_id, fnv1a64(content)));
  pdf += "trailer\n<< /Size " + std::to_string(objects.size() + 1) + " /Root 1 0 R /ID [<" + id + "> <" + id +
         ">] >>\nstartxref\n" + std::to_string(xref) + "\n%%EOF\n";
  return out;
}

std::string_view to_string(WordSource source) noexcept { return source == WordSource::Exact ? "exact" : "ocr"; }

WordSource parse_word_source(std::string_view name) {
  if (name == "exact") return WordSource::Exact;
  if (name == "ocr") return WordSource::Ocr;
  throw std::invalid_argument("word source must be 'exact' or 'ocr', got '" + std::string(name) + "'");
}

std::vector<Word> ingest_ocr_tsv(std::string_view tsv, const PageSize& page, double dpi) {
  if (!(dpi > 0) || !std::isfinite(dpi)) throw ConfigError("DPI must be positive");
  const double scale = 72.0 / dpi;

  struct Row {
    std::array<long long, 5> key;  // page, block, par, line, word
    Word word;
  };
  std::vector<Row> rows;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < tsv.size()) {
    std::size_t end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1 && line.substr(0, 5) == "level") continue;

    auto cols = split_tabs(line);
    if (cols.size() == 11) cols.emplace_back();
    if (cols.size() != 12) {
      throw OcrParseError(line_no, "expected 12 tab-separated columns, found " + std::to_string(cols.size()));
    }
    const long long level = parse_int(cols[0], line_no, "level");
    std::array<long long, 5> key{};
    const char* key_names[] = {"page_num", "block_num", "par_num", "line_num", "word_num"};
    for (std::size_t k = 0; k < 5; ++k) key[k] = parse_int(cols[1 + k], line_no, key_names[k]);
    const long long left = parse_int(cols[6], line_no, "left");
    const long long top = parse_int(cols[7], line_no, "top");
    const long long width = parse_int(cols[8], line_no, "width");
    const long long height = parse_int(cols[9], line_no, "height");
    const double conf = parse_double(cols[10], line_no, "conf");
    const std::string text = normalize_whitespace(cols[11]);

    if (level != 5 || text.empty() || conf < 0) continue;
    if (width <= 0 || height <= 0) continue;
    const double x0 = std::clamp(static_cast<double>(left) * scale, 0.0, page.width);
    const double y0 = std::clamp(static_cast<double>(top) * scale, 0.0, page.height);
    const double x1 = std::clamp(static_cast<double>(left + width) * scale, 0.0, page.width);
    const double y1 = std::clamp(static_cast<double>(top + height) * scale, 0.0, page.height);
    if (!(x0 < x1 && y0 < y1)) continue;
    rows.push_back({key, Word{text, BBox(x0, y0, x1, y1), 0}});
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.key < b.key; });
  std::vector<Word> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].word.reading_order = static_cast<std::uint32_t>(i);
    out.push_back(std::move(rows[i].word));
  }
  return out;
}

std::filesystem::path dpi_sidecar_path(const std::filesystem::path& tsv_path) {
  std::string s = tsv_path.string();
  const std::string suffix = ".ocr.tsv";
  if (s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    s.resize(s.size() - suffix.size());
  } else {
    s = (tsv_path.parent_path() / tsv_path.stem()).string();
  }
  return s + ".dpi";
}

std::vector<Word> load_ocr_words(const std::filesystem::path& tsv_path, const PageSize& page) {
  const auto dpi_path = dpi_sidecar_path(tsv_path);
  if (!std::filesystem::exists(dpi_path)) {
    throw ConfigError("missing DPI sidecar " + dpi_path.string() + " for " + tsv_path.string());
  }
  const std::string dpi_text = normalize_whitespace(read_text_file(dpi_path));
  double dpi = 0;
  auto res = std::from_chars(dpi_text.data(), dpi_text.data() + dpi_text.size(), dpi);
  if (res.ec != std::errc() || res.ptr != dpi_text.data() + dpi_text.size() || !(dpi > 0)) {
    throw ConfigError("DPI sidecar " + dpi_path.string() + " must hold one positive number");
  }
  return ingest_ocr_tsv(read_text_file(tsv_path), page, dpi);
}

std::string synth_ocr_tsv(const std::vector<Word>& words, const PageSize& page, double dpi,
                          const std::map<char, char>& substitutions) {
  const double scale = dpi / 72.0;
  auto px = [&](double v) { return static_cast<long long>(std::llround(v * scale)); };

  std::vector<const Word*> ordered;
  for (const auto& w : words) ordered.push_back(&w);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Word* a, const Word* b) { return a->reading_order < b->reading_order; });

  std::string out = "level\tpage_num\tblock_num\tpar_num\tline_num\tword_num\tleft\ttop\twidth\theight\tconf\ttext\n";
  auto row = [&](int level, long long line, long long word, long long l, long long t, long long w, long long h,
                 const std::string& conf, const std::string& text) {
    out += std::to_string(level) + "\t1\t" + (level > 1 ? "1" : "0") + "\t" + (level > 2 ? "1" : "0") + "\t" +
           std::to_string(line) + "\t" + std::to_string(word) + "\t" + std::to_string(l) + "\t" + std::to_string(t) +
           "\t" + std::to_string(w) + "\t" + std::to_string(h) + "\t" + conf + "\t" + text + "\n";
  };
  row(1, 0, 0, 0, 0, px(page.width), px(page.height), "-1", "");
  if (!ordered.empty()) row(2, 0, 0, 0, 0, px(page.width), px(page.height), "-1", "");
  if (!ordered.empty()) row(3, 0, 0, 0, 0, px(page.width), px(page.height), "-1", "");

  long long line = 0;
  long long word_in_line = 0;
  double current_y = -1;
  for (const Word* w : ordered) {
    if (line == 0 || w->box.y0 != current_y) {
      ++line;
      word_in_line = 0;
      current_y = w->box.y0;
      row(4, line, 0, px(w->box.x0), px(w->box.y0), px(w->box.x1) - px(w->box.x0), px(w->box.y1) - px(w->box.y0),
          "-1", "");
    }
    std::string text = w->text;
    for (char& c : text) {
      if (auto it = substitutions.find(c); it != substitutions.end()) c = it->second;
    }
    const long long l = px(w->box.x0), t = px(w->box.y0);
    row(5, line, ++word_in_line, l, t, px(w->box.x1) - l, px(w->box.y1) - t, "96", text);
  }
  return out;
}

std::vector<Word> words_for(const DocumentAnnotation& doc, WordSource source, const std::filesystem::path& doc_dir) {
  if (source == WordSource::Exact) return doc.words;
  const auto tsv = doc_dir / (doc.doc_id + ".ocr.tsv");
  if (!std::filesystem::exists(tsv)) {
    throw ConfigError("OCR word source requested but " + tsv.string() + " is missing");
  }
  return load_ocr_words(tsv, doc.page);
}

}  // namespace invgrid
