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
#include <string>
#include <vector>

#include <json.hpp>

#include "invgrid/docmodel.hpp"
#include "invgrid/grid.hpp"
#include "invgrid/gridify.hpp"
#include "invgrid/render.hpp"
#include "invgrid/targets.hpp"

namespace invgrid {

inline constexpr std::size_t kDefaultMinComponentArea = 4;
inline constexpr double kDefaultOverlapThreshold = 0.5;

struct Component {
  CellRect rect;
  std::vector<std::uint32_t> cells;  // flat offsets r * W + c
};

// 4-connected components of cells equal to `class_index`, smaller than
// `min_area` dropped, sorted by (top row, left column).
std::vector<Component> connected_components(const Grid& mask, std::uint8_t class_index,
                                            std::size_t min_area = kDefaultMinComponentArea);
// Bounding rectangles of connected_components in grid coordinates (x = column).
std::vector<BBox> components(const Grid& mask, std::uint8_t class_index,
                             std::size_t min_area = kDefaultMinComponentArea);

BBox grid_to_page(const BBox& grid_box, const PageSize& page, const GridConfig& cfg);

// Indices into `words` with overlap_fraction(word, region) > threshold, in
// reading order.
std::vector<std::size_t> assigned_words(const BBox& region, const std::vector<Word>& words, double threshold);
std::string assign_words(const BBox& region, const std::vector<Word>& words,
                         double threshold = kDefaultOverlapThreshold);

struct Extraction {
  FieldLabel label = FieldLabel::CompanyName;
  std::vector<BBox> instance_boxes;  // page coordinates
  std::vector<std::string> texts;    // one per instance box
};

// Mask -> extractions. Line-item labels yield one instance per component.
// Header labels yield at most one instance: the words assigned to any of the
// label's components, boxed by the components' union.
std::vector<Extraction> extract_fields(const Grid& mask, const std::vector<Word>& words, const PageSize& page,
                                       const GridConfig& cfg, const FieldSchema& schema, double threshold,
                                       std::size_t min_area = kDefaultMinComponentArea);

struct FieldScore {
  FieldLabel label = FieldLabel::CompanyName;
  std::uint64_t positives = 0;
  std::uint64_t occurrences = 0;

  double accuracy() const noexcept {
    return occurrences == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(occurrences);
  }
  friend bool operator==(const FieldScore&, const FieldScore&) = default;
};

// Greedy one-to-one matching of predicted to ground-truth instances by
// descending box IoU; a match is positive when the whitespace-normalized
// strings are equal. Every ground-truth instance is one occurrence.
std::vector<FieldScore> score_document(const std::vector<Extraction>& extractions,
                                       const DocumentAnnotation& annotation,
                                       const FieldSchema& schema = FieldSchema{});

struct EvalOptions {
  WordSource word_source = WordSource::Exact;
  double threshold = kDefaultOverlapThreshold;
  std::size_t min_area = kDefaultMinComponentArea;
  unsigned jobs = 1;
};

// Full pipeline for one document: mask -> components -> words -> scores.
std::vector<FieldScore> evaluate_document(const Grid& mask, const DocumentAnnotation& annotation,
                                          const std::vector<Word>& words, const GridConfig& cfg,
                                          const FieldSchema& schema, const EvalOptions& options);

struct EvalReport {
  std::string corpus;
  std::string experiment;
  WordSource word_source = WordSource::Exact;
  double threshold = kDefaultOverlapThreshold;
  std::vector<FieldScore> fields;
  std::uint64_t documents = 0;
  std::vector<std::string> errors;  // per-document failures

  nlohmann::json to_json() const;
  // Two aligned tables: header fields, then line-item fields.
  std::string to_table() const;
};

void accumulate(std::vector<FieldScore>& total, const std::vector<FieldScore>& doc);

// Ground-truth masks from each annotation, scored through the full pipeline.
EvalReport oracle_eval(const std::filesystem::path& corpus_dir, const EvalOptions& options);
// Predicted class-index masks `{pred_dir}/{id}.sem.t`.
EvalReport eval_predictions(const std::filesystem::path& corpus_dir, const std::filesystem::path& pred_dir,
                            const EvalOptions& options);

}  // namespace invgrid
