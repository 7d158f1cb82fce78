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

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "invgrid/docmodel.hpp"
#include "invgrid/font.hpp"
#include "invgrid/layout.hpp"

namespace invgrid {

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OcrParseError : public std::runtime_error {
 public:
  OcrParseError(std::size_t line, const std::string& what)
      : std::runtime_error("OCR TSV line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct RenderedDocument {
  std::string pdf;
  DocumentAnnotation annotation;
};

// Splits every placed run into words with analytic monospace boxes and
// returns a single-page PDF 1.4 plus the matching annotation. Output bytes
// depend only on the inputs. Throws RenderError for characters the base
// font cannot encode.
RenderedDocument emit_pdf(const LayoutDocument& layout, const std::string& doc_id = "doc",
                          const FontMetric& font = courier());

// Maps a code point to its WinAnsiEncoding byte, if it has a printable glyph.
std::optional<unsigned char> win_ansi_byte(char32_t cp) noexcept;

enum class WordSource { Exact, Ocr };
std::string_view to_string(WordSource source) noexcept;
WordSource parse_word_source(std::string_view name);

// Parses the 12-column OCR TSV layout (level, page_num, block_num, par_num,
// line_num, word_num, left, top, width, height, conf, text). Word-level rows
// with text become Words; pixels are converted to points at `dpi` and clipped
// to the page. Reading order follows (page, block, paragraph, line, word).
std::vector<Word> ingest_ocr_tsv(std::string_view tsv, const PageSize& page, double dpi);

// Reads `{stem}.ocr.tsv` with its `{stem}.dpi` sidecar.
std::vector<Word> load_ocr_words(const std::filesystem::path& tsv_path, const PageSize& page);
std::filesystem::path dpi_sidecar_path(const std::filesystem::path& tsv_path);

// Writes words in the same TSV layout at `dpi`, rounding to whole pixels.
// `substitutions` replaces ASCII characters, to mimic recognition errors.
std::string synth_ocr_tsv(const std::vector<Word>& words, const PageSize& page, double dpi,
                          const std::map<char, char>& substitutions = {});

// Exact: the annotation's words. Ocr: `{doc_dir}/{doc_id}.ocr.tsv` + `.dpi`.
std::vector<Word> words_for(const DocumentAnnotation& doc, WordSource source,
                            const std::filesystem::path& doc_dir);

}  // namespace invgrid
