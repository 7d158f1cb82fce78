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
#include <stdexcept>
#include <string>
#include <vector>

#include "invgrid/docmodel.hpp"
#include "invgrid/grid.hpp"
#include "invgrid/gridify.hpp"

namespace invgrid {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered extractable labels. Channel i is labels[i]; the background class
/// is channel F.
struct FieldSchema {
  std::vector<FieldLabel> labels{kAllFields.begin(), kAllFields.end()};

  std::size_t field_count() const noexcept { return labels.size(); }
  std::uint8_t background() const noexcept { return static_cast<std::uint8_t>(labels.size()); }
  // Channel of `label`; throws std::out_of_range if absent.
  std::uint8_t index_of(FieldLabel label) const;
};

struct AnchorShape {
  double height = 4;  // grid rows
  double width = 4;   // grid columns

  friend bool operator==(const AnchorShape&, const AnchorShape&) = default;
};

/// One anchor of each shape centered on every grid cell (stride 1).
struct AnchorSet {
  std::vector<AnchorShape> shapes{{4, 4}, {4, 8}, {4, 16}, {4, 32}};
  double fg_iou = 0.5;
  double bg_iou = 0.2;

  std::size_t count() const noexcept { return shapes.size(); }
  // Throws std::invalid_argument when an invariant is broken.
  void validate() const;
  // Anchor `n` at cell (row, col), in grid coordinates (x = column).
  BBox box(std::uint32_t row, std::uint32_t col, std::size_t n) const;
};

// (tx, ty, tw, th): center offsets normalized by the anchor size and log size ratios.
struct BoxDelta {
  double tx = 0, ty = 0, tw = 0, th = 0;
};
BoxDelta encode_delta(const BBox& anchor, const BBox& target) noexcept;
// Exact inverse of encode_delta. May produce a degenerate box for extreme
// deltas, so the result is unchecked.
BBox apply_delta(const BBox& anchor, const BoxDelta& delta) noexcept;

struct BoxTargets {
  // H x W x 2N u8; per anchor (fg, bg) is (1,0), (0,1), or (0,0) for ignore.
  Grid box_mask;
  // H x W x 4N f32; (tx, ty, tw, th) per anchor, zero unless foreground.
  Grid box_deltas;
};

// H x W u8 class indices; background = schema.background(). Later fields in
// document order overwrite earlier ones.
Grid rasterize_semantic(const std::vector<FieldInstance>& fields, const PageSize& page, const GridConfig& cfg,
                        const FieldSchema& schema);

// gt boxes are in grid coordinates. An anchor is foreground when its IoU with
// some gt box reaches fg_iou, or when it attains the maximum IoU for a gt box;
// background when its best IoU is below bg_iou; ignored otherwise.
BoxTargets encode_boxes(const std::vector<BBox>& gt_boxes, const AnchorSet& anchors, const GridConfig& cfg);

struct ScoredBox {
  BBox box;  // grid coordinates
  double score = 0;
  std::uint32_t row = 0, col = 0;
  std::uint32_t anchor = 0;
};

// Foreground probability is softmax over each (fg, bg) pair. Boxes scoring at
// least `score_threshold` are decoded, clipped to the grid and reduced by
// greedy NMS (a box is dropped when its IoU with a kept box exceeds
// `nms_iou`). Order: score descending, then (row, col, anchor).
std::vector<ScoredBox> decode_boxes(const Grid& box_mask_scores, const Grid& box_deltas, const AnchorSet& anchors,
                                    double score_threshold, double nms_iou);

// Greedy NMS over already-sorted candidates.
std::vector<ScoredBox> non_max_suppression(std::vector<ScoredBox> candidates, double nms_iou);

enum class InputKind { Chargrid, Wordgrid };
std::string_view to_string(InputKind kind) noexcept;
InputKind parse_input_kind(std::string_view name);

// Line-item instance boxes scaled to grid coordinates; the class-agnostic
// regression targets.
std::vector<BBox> box_targets_for(const DocumentAnnotation& doc, const GridConfig& cfg);

struct TargetBundle {
  InputKind kind = InputKind::Chargrid;
  Grid input;  // chargrid (H x W u8) or wordgrid (H x W x D f32)
  Grid semantic;
  BoxTargets boxes;
};

TargetBundle build_bundle(const DocumentAnnotation& doc, const std::vector<Word>& words, const GridConfig& cfg,
                          const FieldSchema& schema, const AnchorSet& anchors, InputKind kind,
                          const EmbeddingProvider* provider);

// File names: {id}.chargrid.t | {id}.wordgrid.t, {id}.sem.t, {id}.boxmask.t, {id}.boxdelta.t
std::vector<std::filesystem::path> bundle_paths(const std::filesystem::path& dir, const std::string& doc_id,
                                                InputKind kind);
void write_bundle(const TargetBundle& bundle, const std::filesystem::path& dir, const std::string& doc_id);

// build_bundle + write_bundle.
void export_targets(const DocumentAnnotation& doc, const std::vector<Word>& words, const GridConfig& cfg,
                    const FieldSchema& schema, const AnchorSet& anchors, InputKind kind,
                    const EmbeddingProvider* provider, const std::filesystem::path& dir);

}  // namespace invgrid
