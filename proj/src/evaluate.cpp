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

#include "invgrid/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <functional>
#include <tuple>
#include <variant>

#include "invgrid/corpus.hpp"
#include "invgrid/parallel.hpp"
#include "invgrid/tensorio.hpp"

namespace invgrid {

namespace {

// Column order of the published result tables.
constexpr std::array<FieldLabel, 5> kHeaderTableOrder = {FieldLabel::CompanyName, FieldLabel::InvoiceNumber,
                                                         FieldLabel::InvoiceDate, FieldLabel::InvoiceAmount,
                                                         FieldLabel::CompanyAddress};
constexpr std::array<FieldLabel, 3> kItemTableOrder = {FieldLabel::ItemName, FieldLabel::ItemQuantity,
                                                       FieldLabel::ItemAmount};

std::string table_heading(FieldLabel label) {
  switch (label) {
    case FieldLabel::InvoiceDate: return "date";
    case FieldLabel::InvoiceAmount: return "amount";
    case FieldLabel::ItemName: return "item-names";
    case FieldLabel::ItemQuantity: return "item-quantities";
    case FieldLabel::ItemAmount: return "item-amounts";
    default: return std::string(to_string(label));
  }
}

std::string percent(const FieldScore& s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * s.accuracy());
  return buf;
}

template <std::size_t N>
std::string render_table(const std::string& row_name, const std::array<FieldLabel, N>& order,
                         const std::vector<FieldScore>& fields) {
  std::vector<std::string> head = {"Experiment"};
  std::vector<std::string> row = {row_name};
  for (FieldLabel label : order) {
    head.push_back(table_heading(label));
    auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldScore& s) { return s.label == label; });
    row.push_back(it == fields.end() ? "-" : percent(*it));
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t i = 0; i < head.size(); ++i) width[i] = std::max(head[i].size(), row[i].size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += " | ";
      out += cells[i] + std::string(width[i] - cells[i].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::size_t total = 0;
  for (auto w : width) total += w;
  total += 3 * (width.size() - 1);
  return line(head) + std::string(total, '-') + "\n" + line(row);
}

std::vector<FieldScore> empty_scores(const FieldSchema& schema) {
  std::vector<FieldScore> out;
  for (FieldLabel label : schema.labels) out.push_back({label, 0, 0});
  return out;
}

struct DocOutcome {
  std::vector<FieldScore> scores;
  std::string error;
};

EvalReport run_corpus(const std::filesystem::path& corpus_dir, const EvalOptions& options, const std::string& experiment,
                      const std::function<Grid(const DocumentAnnotation&, const Manifest&)>& mask_for) {
  const Manifest manifest = Manifest::load(corpus_dir);
  const auto docs_dir = corpus_dir / kDocumentsDir;

  EvalReport report;
  report.corpus = std::filesystem::weakly_canonical(corpus_dir).filename().string();
  report.experiment = experiment;
  report.word_source = options.word_source;
  report.threshold = options.threshold;
  report.fields = empty_scores(manifest.schema);

  ordered_parallel(
      manifest.documents.size(), options.jobs,
      [&](std::size_t i) {
        const auto& entry = manifest.documents[i];
        DocOutcome out;
        try {
          const auto ann_path = docs_dir / (entry.id + ".json");
          if (!std::filesystem::exists(ann_path)) throw std::runtime_error("missing annotation " + ann_path.string());
          const DocumentAnnotation ann = parse_annotation(read_file_bytes(ann_path));
          const auto words = words_for(ann, options.word_source, docs_dir);
          const Grid mask = mask_for(ann, manifest);
          out.scores = evaluate_document(mask, ann, words, manifest.grid, manifest.schema, options);
        } catch (const std::exception& e) {
          out.error = entry.id + ": " + e.what();
        }
        return out;
      },
      [&](std::size_t, DocOutcome outcome) {
        if (!outcome.error.empty()) {
          report.errors.push_back(std::move(outcome.error));
          return;
        }
        accumulate(report.fields, outcome.scores);
        ++report.documents;
      });
  return report;
}

}  // namespace

std::vector<Component> connected_components(const Grid& mask, std::uint8_t class_index, std::size_t min_area) {
  if (mask.dims().size() != 2 || mask.dtype() != DType::U8) throw ShapeError("mask must be a 2-D u8 grid");
  const std::uint32_t h = mask.dims()[0];
  const std::uint32_t w = mask.dims()[1];
  const auto data = mask.u8_data();
  std::vector<char> seen(data.size(), 0);
  std::vector<Component> out;
  std::deque<std::uint32_t> queue;

  for (std::uint32_t start = 0; start < data.size(); ++start) {
    if (seen[start] || data[start] != class_index) continue;
    Component comp;
    std::uint32_t r0 = h, c0 = w, r1 = 0, c1 = 0;
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::uint32_t cell = queue.front();
      queue.pop_front();
      comp.cells.push_back(cell);
      const std::uint32_t r = cell / w, c = cell % w;
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
      auto visit = [&](std::uint32_t next) {
        if (!seen[next] && data[next] == class_index) {
          seen[next] = 1;
          queue.push_back(next);
        }
      };
      if (r > 0) visit(cell - w);
      if (r + 1 < h) visit(cell + w);
      if (c > 0) visit(cell - 1);
      if (c + 1 < w) visit(cell + 1);
    }
    if (comp.cells.size() < min_area) continue;
    std::sort(comp.cells.begin(), comp.cells.end());
    comp.rect = {r0, c0, r1 + 1, c1 + 1};
    out.push_back(std::move(comp));
  }
  std::stable_sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
    return std::tie(a.rect.r0, a.rect.c0) < std::tie(b.rect.r0, b.rect.c0);
  });
  return out;
}

std::vector<BBox> components(const Grid& mask, std::uint8_t class_index, std::size_t min_area) {
  std::vector<BBox> out;
  for (const auto& comp : connected_components(mask, class_index, min_area)) {
    out.emplace_back(comp.rect.c0, comp.rect.r0, comp.rect.c1, comp.rect.r1);
  }
  return out;
}

BBox grid_to_page(const BBox& grid_box, const PageSize& page, const GridConfig& cfg) {
  auto x = [&](double v) { return v * page.width / cfg.width; };
  auto y = [&](double v) { return v * page.height / cfg.height; };
  return BBox(x(grid_box.x0), y(grid_box.y0), x(grid_box.x1), y(grid_box.y1));
}

std::vector<std::size_t> assigned_words(const BBox& region, const std::vector<Word>& words, double threshold) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (overlap_fraction(words[i].box, region) > threshold) hits.push_back(i);
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [&](std::size_t a, std::size_t b) { return words[a].reading_order < words[b].reading_order; });
  return hits;
}

std::string assign_words(const BBox& region, const std::vector<Word>& words, double threshold) {
  std::string out;
  for (std::size_t i : assigned_words(region, words, threshold)) {
    if (!out.empty()) out += ' ';
    out += words[i].text;
  }
  return out;
}

std::vector<Extraction> extract_fields(const Grid& mask, const std::vector<Word>& words, const PageSize& page,
                                       const GridConfig& cfg, const FieldSchema& schema, double threshold,
                                       std::size_t min_area) {
  if (mask.dims().size() != 2 || mask.dims()[0] != cfg.height || mask.dims()[1] != cfg.width) {
    throw ShapeError("mask dimensions do not match the grid configuration");
  }
  std::vector<Extraction> out;
  for (FieldLabel label : schema.labels) {
    Extraction ex;
    ex.label = label;
    const auto boxes = components(mask, schema.index_of(label), min_area);
    if (is_line_item(label)) {
      for (const auto& gb : boxes) {
        const BBox region = grid_to_page(gb, page, cfg);
        ex.instance_boxes.push_back(region);
        ex.texts.push_back(assign_words(region, words, threshold));
      }
    } else if (!boxes.empty()) {
      std::vector<BBox> regions;
      for (const auto& gb : boxes) regions.push_back(grid_to_page(gb, page, cfg));
      BBox envelope = regions.front();
      std::vector<std::size_t> hits;
      for (const auto& region : regions) {
        envelope = bounding_union(envelope, region);
        for (std::size_t i : assigned_words(region, words, threshold)) hits.push_back(i);
      }
      std::sort(hits.begin(), hits.end());
      hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
      std::stable_sort(hits.begin(), hits.end(),
                       [&](std::size_t a, std::size_t b) { return words[a].reading_order < words[b].reading_order; });
      std::string text;
      for (std::size_t i : hits) {
        if (!text.empty()) text += ' ';
        text += words[i].text;
      }
      ex.instance_boxes.push_back(envelope);
      ex.texts.push_back(std::move(text));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<FieldScore> score_document(const std::vector<Extraction>& extractions, const DocumentAnnotation& annotation,
                                       const FieldSchema& schema) {
  std::vector<FieldScore> scores = empty_scores(schema);
  for (auto& score : scores) {
    std::vector<const FieldInstance*> truth;
    for (const auto& f : annotation.fields) {
      if (f.label == score.label) truth.push_back(&f);
    }
    score.occurrences = truth.size();

    const Extraction* ex = nullptr;
    for (const auto& e : extractions) {
      if (e.label == score.label) ex = &e;
    }
    if (!ex || truth.empty()) continue;
    if (ex->texts.size() != ex->instance_boxes.size()) {
      throw std::invalid_argument("extraction for " + std::string(to_string(score.label)) +
                                  " has mismatched boxes and texts");
    }

    struct Pair {
      double iou;
      std::size_t pred, gt;
    };
    std::vector<Pair> pairs;
    for (std::size_t p = 0; p < ex->instance_boxes.size(); ++p) {
      for (std::size_t g = 0; g < truth.size(); ++g) {
        const double v = iou(ex->instance_boxes[p], truth[g]->envelope());
        if (v > 0.0) pairs.push_back({v, p, g});
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
      if (a.iou != b.iou) return a.iou > b.iou;
      const BBox& pa = ex->instance_boxes[a.pred];
      const BBox& pb = ex->instance_boxes[b.pred];
      return std::tie(pa.y0, pa.x0, a.gt) < std::tie(pb.y0, pb.x0, b.gt);
    });
    std::vector<char> pred_used(ex->instance_boxes.size(), 0), gt_used(truth.size(), 0);
    for (const auto& pair : pairs) {
      if (pred_used[pair.pred] || gt_used[pair.gt]) continue;
      pred_used[pair.pred] = gt_used[pair.gt] = 1;
      if (normalize_whitespace(ex->texts[pair.pred]) == normalize_whitespace(truth[pair.gt]->value)) {
        ++score.positives;
      }
    }
  }
  return scores;
}

std::vector<FieldScore> evaluate_document(const Grid& mask, const DocumentAnnotation& annotation,
                                          const std::vector<Word>& words, const GridConfig& cfg,
                                          const FieldSchema& schema, const EvalOptions& options) {
  const auto extractions =
      extract_fields(mask, words, annotation.page, cfg, schema, options.threshold, options.min_area);
  return score_document(extractions, annotation, schema);
}

void accumulate(std::vector<FieldScore>& total, const std::vector<FieldScore>& doc) {
  for (const auto& s : doc) {
    auto it = std::find_if(total.begin(), total.end(), [&](const FieldScore& t) { return t.label == s.label; });
    if (it == total.end()) {
      total.push_back(s);
    } else {
      it->positives += s.positives;
      it->occurrences += s.occurrences;
    }
  }
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json jf = nlohmann::json::array();
  for (const auto& s : fields) {
    jf.push_back({{"label", std::string(to_string(s.label))},
                  {"positives", s.positives},
                  {"occurrences", s.occurrences},
                  {"accuracy", s.accuracy()}});
  }
  return {{"corpus", corpus},
          {"experiment", experiment},
          {"word_source", std::string(to_string(word_source))},
          {"threshold", threshold},
          {"fields", std::move(jf)},
          {"documents", documents},
          {"errors", errors}};
}

std::string EvalReport::to_table() const {
  return render_table(experiment, kHeaderTableOrder, fields) + "\n" + render_table(experiment, kItemTableOrder, fields);
}

EvalReport oracle_eval(const std::filesystem::path& corpus_dir, const EvalOptions& options) {
  return run_corpus(corpus_dir, options, "Ground Truth Mask", [](const DocumentAnnotation& ann, const Manifest& m) {
    return rasterize_semantic(ann.fields, ann.page, m.grid, m.schema);
  });
}

EvalReport eval_predictions(const std::filesystem::path& corpus_dir, const std::filesystem::path& pred_dir,
                            const EvalOptions& options) {
  return run_corpus(corpus_dir, options, "Prediction", [&](const DocumentAnnotation& ann, const Manifest& m) {
    const auto path = pred_dir / (ann.doc_id + ".sem.t");
    if (!std::filesystem::exists(path)) throw std::runtime_error("missing prediction mask " + path.string());
    Grid mask = read_tensor(path);
    const auto& d = mask.dims();
    if (mask.dtype() != DType::U8 || d.size() != 2 || d[0] != m.grid.height || d[1] != m.grid.width) {
      throw ShapeError("prediction mask " + path.string() + " does not match the manifest grid " +
                       std::to_string(m.grid.height) + "x" + std::to_string(m.grid.width) + " u8");
    }
    for (auto v : mask.u8_data()) {
      if (v > m.schema.background()) throw ShapeError("prediction mask " + path.string() + " has class index > F");
    }
    return mask;
  });
}

}  // namespace invgrid
