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

#include "invgrid/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "invgrid/tensorio.hpp"

namespace invgrid {

namespace {

BBox anchor_at(std::uint32_t row, std::uint32_t col, const AnchorShape& s) noexcept {
  const double xc = col + 0.5;
  const double yc = row + 0.5;
  return BBox::unchecked(xc - 0.5 * s.width, yc - 0.5 * s.height, xc + 0.5 * s.width, yc + 0.5 * s.height);
}

// Cell range [lo, hi] whose anchors of shape `s` can intersect `gt`.
struct CellWindow {
  std::uint32_t r_lo, r_hi, c_lo, c_hi;
  bool empty;
};

CellWindow window_for(const BBox& gt, const AnchorShape& s, const GridConfig& cfg) {
  const double c_lo = std::floor(gt.x0 - 0.5 - 0.5 * s.width);
  const double c_hi = std::ceil(gt.x1 - 0.5 + 0.5 * s.width);
  const double r_lo = std::floor(gt.y0 - 0.5 - 0.5 * s.height);
  const double r_hi = std::ceil(gt.y1 - 0.5 + 0.5 * s.height);
  CellWindow w{};
  w.empty = c_hi < 0 || r_hi < 0 || c_lo > cfg.width - 1.0 || r_lo > cfg.height - 1.0;
  if (w.empty) return w;
  w.c_lo = static_cast<std::uint32_t>(std::max(0.0, c_lo));
  w.c_hi = static_cast<std::uint32_t>(std::min<double>(cfg.width - 1, c_hi));
  w.r_lo = static_cast<std::uint32_t>(std::max(0.0, r_lo));
  w.r_hi = static_cast<std::uint32_t>(std::min<double>(cfg.height - 1, r_hi));
  return w;
}

void require_shape(const Grid& g, const GridConfig&, std::uint32_t channels, const char* what, std::uint32_t h,
                   std::uint32_t w) {
  const auto& d = g.dims();
  if (d.size() != 3 || d[0] != h || d[1] != w || d[2] != channels) {
    std::string got;
    for (auto v : d) got += (got.empty() ? "" : "x") + std::to_string(v);
    throw ShapeError(std::string(what) + ": expected " + std::to_string(h) + "x" + std::to_string(w) + "x" +
                     std::to_string(channels) + ", got " + (got.empty() ? "scalar" : got));
  }
}

}  // namespace

std::uint8_t FieldSchema::index_of(FieldLabel label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw std::out_of_range("label not in schema: " + std::string(to_string(label)));
  return static_cast<std::uint8_t>(it - labels.begin());
}

void AnchorSet::validate() const {
  if (shapes.empty()) throw std::invalid_argument("anchor set needs at least one shape");
  for (const auto& s : shapes) {
    if (!(s.height > 0 && s.width > 0)) throw std::invalid_argument("anchor shapes must be positive");
  }
  if (!(fg_iou > bg_iou)) throw std::invalid_argument("fg_iou must exceed bg_iou");
}

BBox AnchorSet::box(std::uint32_t row, std::uint32_t col, std::size_t n) const {
  return anchor_at(row, col, shapes.at(n));
}

BoxDelta encode_delta(const BBox& anchor, const BBox& target) noexcept {
  return {(target.cx() - anchor.cx()) / anchor.width(), (target.cy() - anchor.cy()) / anchor.height(),
          std::log(target.width() / anchor.width()), std::log(target.height() / anchor.height())};
}

BBox apply_delta(const BBox& anchor, const BoxDelta& d) noexcept {
  const double cx = anchor.cx() + d.tx * anchor.width();
  const double cy = anchor.cy() + d.ty * anchor.height();
  const double w = anchor.width() * std::exp(d.tw);
  const double h = anchor.height() * std::exp(d.th);
  return BBox::unchecked(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

Grid rasterize_semantic(const std::vector<FieldInstance>& fields, const PageSize& page, const GridConfig& cfg,
                        const FieldSchema& schema) {
  Grid mask = Grid::u8({cfg.height, cfg.width}, schema.background());
  auto data = mask.u8_data();
  for (const auto& f : fields) {
    const std::uint8_t cls = schema.index_of(f.label);
    for (const auto& b : f.boxes) {
      const CellRect rect = to_cell(b, page, cfg);
      for (std::uint32_t r = rect.r0; r < rect.r1; ++r) {
        std::fill_n(data.begin() + static_cast<std::ptrdiff_t>(mask.offset(r, rect.c0)), rect.c1 - rect.c0, cls);
      }
    }
  }
  return mask;
}

BoxTargets encode_boxes(const std::vector<BBox>& gt_boxes, const AnchorSet& anchors, const GridConfig& cfg) {
  anchors.validate();
  const std::size_t n_shapes = anchors.count();
  const auto n32 = static_cast<std::uint32_t>(n_shapes);
  BoxTargets out{Grid::u8({cfg.height, cfg.width, 2 * n32}, 0), Grid::f32({cfg.height, cfg.width, 4 * n32}, 0.0f)};
  const std::size_t total = std::size_t{cfg.height} * cfg.width * n_shapes;

  std::vector<double> best_iou(total, 0.0);
  std::vector<std::int32_t> best_gt(total, -1);
  std::vector<double> gt_max(gt_boxes.size(), 0.0);
  // anchors with nonzero IoU against some gt box; all others are background
  std::vector<std::size_t> touched;
  auto index = [&](std::uint32_t r, std::uint32_t c, std::size_t n) {
    return (std::size_t{r} * cfg.width + c) * n_shapes + n;
  };

  for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
    const BBox& gt = gt_boxes[g];
    for (std::size_t n = 0; n < n_shapes; ++n) {
      const auto win = window_for(gt, anchors.shapes[n], cfg);
      if (win.empty) continue;
      for (std::uint32_t r = win.r_lo; r <= win.r_hi; ++r) {
        for (std::uint32_t c = win.c_lo; c <= win.c_hi; ++c) {
          const double v = iou(anchor_at(r, c, anchors.shapes[n]), gt);
          const std::size_t a = index(r, c, n);
          if (v > best_iou[a]) {
            if (best_gt[a] < 0) touched.push_back(a);
            best_iou[a] = v;
            best_gt[a] = static_cast<std::int32_t>(g);
          }
          gt_max[g] = std::max(gt_max[g], v);
        }
      }
    }
  }

  // Argmax rule: every anchor attaining a gt box's maximum IoU is foreground
  // for that box, so each gt box has at least one foreground anchor.
  std::vector<std::int32_t> forced(total, -1);
  for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
    if (gt_max[g] <= 0.0) continue;
    for (std::size_t n = 0; n < n_shapes; ++n) {
      const auto win = window_for(gt_boxes[g], anchors.shapes[n], cfg);
      if (win.empty) continue;
      for (std::uint32_t r = win.r_lo; r <= win.r_hi; ++r) {
        for (std::uint32_t c = win.c_lo; c <= win.c_hi; ++c) {
          const std::size_t a = index(r, c, n);
          if (forced[a] < 0 && iou(anchor_at(r, c, anchors.shapes[n]), gt_boxes[g]) == gt_max[g]) {
            forced[a] = static_cast<std::int32_t>(g);
          }
        }
      }
    }
  }

  auto mask = out.box_mask.u8_data();
  auto deltas = out.box_deltas.f32_data();
  for (std::size_t a = 0; a < total; ++a) mask[2 * a + 1] = 1;
  for (const std::size_t a : touched) {
    std::int32_t match = -1;
    if (forced[a] >= 0) {
      match = forced[a];
    } else if (best_iou[a] >= anchors.fg_iou) {
      match = best_gt[a];
    }
    if (match >= 0) {
      const std::size_t n = a % n_shapes, cell = a / n_shapes;
      const auto r = static_cast<std::uint32_t>(cell / cfg.width), c = static_cast<std::uint32_t>(cell % cfg.width);
      mask[2 * a] = 1;
      mask[2 * a + 1] = 0;
      const BoxDelta d = encode_delta(anchor_at(r, c, anchors.shapes[n]), gt_boxes[static_cast<std::size_t>(match)]);
      deltas[4 * a + 0] = static_cast<float>(d.tx);
      deltas[4 * a + 1] = static_cast<float>(d.ty);
      deltas[4 * a + 2] = static_cast<float>(d.tw);
      deltas[4 * a + 3] = static_cast<float>(d.th);
    } else if (best_iou[a] >= anchors.bg_iou) {
      mask[2 * a + 1] = 0;
    }
  }
  return out;
}

std::vector<ScoredBox> non_max_suppression(std::vector<ScoredBox> candidates, double nms_iou) {
  std::vector<ScoredBox> kept;
  for (auto& cand : candidates) {
    bool keep = true;
    for (const auto& k : kept) {
      if (iou(cand.box, k.box) > nms_iou) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(std::move(cand));
  }
  return kept;
}

std::vector<ScoredBox> decode_boxes(const Grid& box_mask_scores, const Grid& box_deltas, const AnchorSet& anchors,
                                    double score_threshold, double nms_iou) {
  anchors.validate();
  if (box_mask_scores.dims().size() != 3) throw ShapeError("box mask scores must be H x W x 2N");
  if (box_mask_scores.dtype() != DType::F32 || box_deltas.dtype() != DType::F32) {
    throw ShapeError("box mask scores and deltas must be f32");
  }
  const std::uint32_t h = box_mask_scores.dims()[0];
  const std::uint32_t w = box_mask_scores.dims()[1];
  const auto n_shapes = static_cast<std::uint32_t>(anchors.count());
  GridConfig cfg;
  cfg.height = h;
  cfg.width = w;
  require_shape(box_mask_scores, cfg, 2 * n_shapes, "box mask scores", h, w);
  require_shape(box_deltas, cfg, 4 * n_shapes, "box deltas", h, w);

  // p = 1 / (1 + exp(bg - fg)) >= t  <=>  fg - bg >= logit(t); the margin
  // test screens candidates before the exact probability check.
  double margin = -std::numeric_limits<double>::infinity();
  if (score_threshold >= 1.0) {
    margin = std::numeric_limits<double>::infinity();
  } else if (score_threshold > 0.0) {
    margin = std::log(score_threshold / (1.0 - score_threshold)) - 1e-6;
  }

  const auto scores = box_mask_scores.f32_data();
  const auto deltas = box_deltas.f32_data();
  const BBox bounds(0, 0, w, h);
  std::vector<ScoredBox> candidates;
  for (std::uint32_t r = 0; r < h; ++r) {
    for (std::uint32_t c = 0; c < w; ++c) {
      for (std::uint32_t n = 0; n < n_shapes; ++n) {
        const std::size_t a = (std::size_t{r} * w + c) * n_shapes + n;
        const double fg = scores[2 * a];
        const double bg = scores[2 * a + 1];
        if (!(fg - bg >= margin) && score_threshold > 0.0) continue;
        const double p = 1.0 / (1.0 + std::exp(bg - fg));
        if (p < score_threshold) continue;
        const BoxDelta d{deltas[4 * a], deltas[4 * a + 1], deltas[4 * a + 2], deltas[4 * a + 3]};
        BBox b = apply_delta(anchor_at(r, c, anchors.shapes[n]), d);
        b = BBox::unchecked(std::clamp(b.x0, 0.0, bounds.x1), std::clamp(b.y0, 0.0, bounds.y1),
                            std::clamp(b.x1, 0.0, bounds.x1), std::clamp(b.y1, 0.0, bounds.y1));
        if (!b.valid()) continue;
        candidates.push_back({b, p, r, c, n});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const ScoredBox& a, const ScoredBox& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.row, a.col, a.anchor) < std::tie(b.row, b.col, b.anchor);
  });
  return non_max_suppression(std::move(candidates), nms_iou);
}

std::string_view to_string(InputKind kind) noexcept { return kind == InputKind::Chargrid ? "chargrid" : "wordgrid"; }

InputKind parse_input_kind(std::string_view name) {
  if (name == "chargrid") return InputKind::Chargrid;
  if (name == "wordgrid") return InputKind::Wordgrid;
  throw std::invalid_argument("input kind must be 'chargrid' or 'wordgrid', got '" + std::string(name) + "'");
}

std::vector<BBox> box_targets_for(const DocumentAnnotation& doc, const GridConfig& cfg) {
  std::vector<BBox> out;
  for (const auto& f : doc.fields) {
    if (!is_line_item(f.label)) continue;
    for (const auto& b : f.boxes) out.push_back(page_to_grid(b, doc.page, cfg));
  }
  return out;
}

TargetBundle build_bundle(const DocumentAnnotation& doc, const std::vector<Word>& words, const GridConfig& cfg,
                          const FieldSchema& schema, const AnchorSet& anchors, InputKind kind,
                          const EmbeddingProvider* provider) {
  TargetBundle bundle;
  bundle.kind = kind;
  if (kind == InputKind::Chargrid) {
    bundle.input = build_chargrid(words, doc.page, cfg);
  } else {
    if (!provider) throw EmbeddingError("wordgrid input needs an embedding provider");
    bundle.input = build_wordgrid(words, doc.page, cfg, *provider);
  }
  bundle.semantic = rasterize_semantic(doc.fields, doc.page, cfg, schema);
  bundle.boxes = encode_boxes(box_targets_for(doc, cfg), anchors, cfg);
  return bundle;
}

std::vector<std::filesystem::path> bundle_paths(const std::filesystem::path& dir, const std::string& doc_id,
                                                InputKind kind) {
  return {dir / (doc_id + "." + std::string(to_string(kind)) + ".t"), dir / (doc_id + ".sem.t"),
          dir / (doc_id + ".boxmask.t"), dir / (doc_id + ".boxdelta.t")};
}

void write_bundle(const TargetBundle& bundle, const std::filesystem::path& dir, const std::string& doc_id) {
  const auto paths = bundle_paths(dir, doc_id, bundle.kind);
  write_tensor(paths[0], bundle.input);
  write_tensor(paths[1], bundle.semantic);
  write_tensor(paths[2], bundle.boxes.box_mask);
  write_tensor(paths[3], bundle.boxes.box_deltas);
}

void export_targets(const DocumentAnnotation& doc, const std::vector<Word>& words, const GridConfig& cfg,
                    const FieldSchema& schema, const AnchorSet& anchors, InputKind kind,
                    const EmbeddingProvider* provider, const std::filesystem::path& dir) {
  write_bundle(build_bundle(doc, words, cfg, schema, anchors, kind, provider), dir, doc.doc_id);
}

}  // namespace invgrid
