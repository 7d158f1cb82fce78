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

#include "invgrid/corpus.hpp"

#include <cstdio>
#include <fstream>

#include "invgrid/layout.hpp"
#include "invgrid/parallel.hpp"
#include "invgrid/recordgen.hpp"
#include "invgrid/render.hpp"
#include "invgrid/rng.hpp"
#include "invgrid/tensorio.hpp"

namespace invgrid {

namespace {

constexpr const char* kFormatName = "invgrid-corpus";
constexpr int kFormatVersion = 1;

nlohmann::json grid_json(const GridConfig& g) {
  return {{"height", g.height}, {"width", g.width}, {"embed_dim", g.embed_dim}};
}

void apply_grid_json(GridConfig& g, const nlohmann::json& j) {
  g.height = j.value("height", g.height);
  g.width = j.value("width", g.width);
  g.embed_dim = j.value("embed_dim", g.embed_dim);
}

nlohmann::json anchors_json(const AnchorSet& a) {
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& s : a.shapes) shapes.push_back({s.height, s.width});
  return {{"shapes", shapes}, {"fg_iou", a.fg_iou}, {"bg_iou", a.bg_iou}};
}

void apply_anchors_json(AnchorSet& a, const nlohmann::json& j) {
  if (j.contains("shapes")) {
    a.shapes.clear();
    for (const auto& s : j.at("shapes")) a.shapes.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  }
  a.fg_iou = j.value("fg_iou", a.fg_iou);
  a.bg_iou = j.value("bg_iou", a.bg_iou);
  a.validate();
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingSource& src, std::uint32_t dim, std::string& tag) {
  if (src.hashed) {
    tag = "hashed";
    return std::make_unique<HashedEmbedding>(dim);
  }
  const std::string bytes = read_file_bytes(src.sidecar);
  tag = "sidecar:" + hex64(fnv1a64(bytes));
  return std::make_unique<SidecarEmbedding>(SidecarEmbedding::parse(bytes));
}

struct DocFiles {
  std::string pdf, json, tsv, dpi;
  std::string error;
};

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

void apply_config_json(CorpusConfig& cfg, const nlohmann::json& j) {
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("template_dir")) cfg.template_dir = j.at("template_dir").get<std::string>();
  if (j.contains("lexicon_dir")) cfg.lexicon_dir = j.at("lexicon_dir").get<std::string>();
  if (j.contains("counts")) {
    const auto& c = j.at("counts");
    auto count = [&](const char* key, std::uint64_t fallback) -> std::uint64_t {
      if (!c.contains(key)) return fallback;
      const auto& v = c.at(key);
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(std::string("counts.") + key + " must be a non-negative integer");
      }
      return v.get<std::uint64_t>();
    };
    cfg.counts.train = count("train", cfg.counts.train);
    cfg.counts.val = count("val", cfg.counts.val);
    cfg.counts.test = count("test", cfg.counts.test);
  }
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("grid")) apply_grid_json(cfg.grid, j.at("grid"));
  if (j.contains("anchors")) apply_anchors_json(cfg.anchors, j.at("anchors"));
  if (j.contains("input_kind")) cfg.input_kind = parse_input_kind(j.at("input_kind").get<std::string>());
  if (j.contains("embedding")) {
    const auto& e = j.at("embedding");
    if (e.is_string() && e.get<std::string>() == "hashed") {
      cfg.embedding = {};
    } else if (e.is_object() && e.contains("sidecar")) {
      cfg.embedding = {false, e.at("sidecar").get<std::string>()};
    } else {
      throw ConfigError("embedding must be \"hashed\" or {\"sidecar\": path}");
    }
  }
  if (j.contains("ocr_dpi")) {
    if (j.at("ocr_dpi").is_null()) {
      cfg.ocr_dpi.reset();
    } else {
      cfg.ocr_dpi = j.at("ocr_dpi").get<double>();
    }
  }
  cfg.jobs = j.value("jobs", cfg.jobs);
}

CorpusConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  CorpusConfig cfg;
  try {
    apply_config_json(cfg, nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return cfg;
}

std::string document_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "doc-%06zu", index);
  return buf;
}

std::uint64_t document_seed(std::uint64_t corpus_seed, std::size_t index) {
  std::uint64_t state = corpus_seed + static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL;
  return splitmix64(state);
}

std::vector<DocumentEntry> plan_corpus(const SplitCounts& counts, std::uint64_t seed,
                                       const std::vector<std::string>& template_ids) {
  if (template_ids.empty()) throw ConfigError("no templates available");
  std::vector<DocumentEntry> plan;
  plan.reserve(counts.total());
  for (std::size_t i = 0; i < counts.total(); ++i) {
    Split split = Split::Test;
    if (i < counts.train) {
      split = Split::Train;
    } else if (i < counts.train + counts.val) {
      split = Split::Val;
    }
    plan.push_back({document_id(i), template_ids[i % template_ids.size()], document_seed(seed, i), split});
  }
  return plan;
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : documents) {
    docs.push_back({{"id", d.id}, {"template_id", d.template_id}, {"seed", d.seed}, {"split", to_string(d.split)}});
  }
  nlohmann::json labels = nlohmann::json::array();
  for (FieldLabel l : schema.labels) labels.push_back(std::string(to_string(l)));
  nlohmann::json grid = grid_json(this->grid);
  grid["vocab_size"] = kVocabSize;
  grid["vocab_hash"] = hex64(vocab_hash());
  nlohmann::json j = {
      {"format", kFormatName},
      {"version", kFormatVersion},
      {"seed", seed},
      {"counts", {{"train", counts.train}, {"val", counts.val}, {"test", counts.test}}},
      {"templates", templates},
      {"template_set_hash", template_set_hash},
      {"lexicon_hash", lexicon_hash},
      {"grid", grid},
      {"fields", labels},
      {"background_class", schema.background()},
      {"anchors", anchors_json(anchors)},
      {"documents", docs},
  };
  j["ocr_dpi"] = ocr_dpi ? nlohmann::json(*ocr_dpi) : nlohmann::json();
  if (tensors) {
    const std::uint32_t n = static_cast<std::uint32_t>(anchors.count());
    nlohmann::json files = nlohmann::json::object();
    if (tensors->inputs) {
      if (tensors->input_kind == InputKind::Chargrid) {
        files["chargrid"] = {{"suffix", ".chargrid.t"}, {"dtype", "u8"}, {"dims", {this->grid.height, this->grid.width}}};
      } else {
        files["wordgrid"] = {{"suffix", ".wordgrid.t"},
                             {"dtype", "f32"},
                             {"dims", {this->grid.height, this->grid.width, this->grid.embed_dim}}};
      }
    }
    if (tensors->targets) {
      files["sem"] = {{"suffix", ".sem.t"}, {"dtype", "u8"}, {"dims", {this->grid.height, this->grid.width}}};
      files["boxmask"] = {{"suffix", ".boxmask.t"}, {"dtype", "u8"}, {"dims", {this->grid.height, this->grid.width, 2 * n}}};
      files["boxdelta"] = {{"suffix", ".boxdelta.t"}, {"dtype", "f32"}, {"dims", {this->grid.height, this->grid.width, 4 * n}}};
    }
    j["tensors"] = {{"dir", kTensorsDir},
                    {"input_kind", std::string(to_string(tensors->input_kind))},
                    {"embedding", tensors->embedding},
                    {"inputs", tensors->inputs},
                    {"targets", tensors->targets},
                    {"files", files}};
  } else {
    j["tensors"] = nullptr;
  }
  return j;
}

Manifest Manifest::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != kFormatName) throw ConfigError("manifest: not an invgrid corpus manifest");
  if (j.value("version", 0) != kFormatVersion) throw ConfigError("manifest: unsupported version");
  Manifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  const auto& c = j.at("counts");
  m.counts = {c.at("train").get<std::uint64_t>(), c.at("val").get<std::uint64_t>(), c.at("test").get<std::uint64_t>()};
  m.templates = j.at("templates").get<std::vector<std::string>>();
  m.template_set_hash = j.at("template_set_hash").get<std::string>();
  m.lexicon_hash = j.at("lexicon_hash").get<std::string>();
  apply_grid_json(m.grid, j.at("grid"));
  m.schema.labels.clear();
  for (const auto& l : j.at("fields")) m.schema.labels.push_back(parse_field_label(l.get<std::string>()));
  apply_anchors_json(m.anchors, j.at("anchors"));
  for (const auto& d : j.at("documents")) {
    m.documents.push_back({d.at("id").get<std::string>(), d.at("template_id").get<std::string>(),
                           d.at("seed").get<std::uint64_t>(), parse_split(d.at("split").get<std::string>())});
  }
  if (j.contains("ocr_dpi") && !j.at("ocr_dpi").is_null()) m.ocr_dpi = j.at("ocr_dpi").get<double>();
  if (j.contains("tensors") && !j.at("tensors").is_null()) {
    const auto& t = j.at("tensors");
    TensorInfo info;
    info.input_kind = parse_input_kind(t.at("input_kind").get<std::string>());
    info.embedding = t.at("embedding").get<std::string>();
    info.inputs = t.at("inputs").get<bool>();
    info.targets = t.at("targets").get<bool>();
    m.tensors = info;
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& corpus_dir) {
  const auto path = corpus_dir / kManifestFile;
  if (!std::filesystem::exists(path)) throw ConfigError("no manifest at " + path.string());
  try {
    return from_json(nlohmann::json::parse(read_file_bytes(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
}

void Manifest::save(const std::filesystem::path& corpus_dir) const {
  write_file_atomic(corpus_dir / kManifestFile, to_json().dump(2) + "\n");
}

CommandResult cmd_generate(const CorpusConfig& cfg) {
  cfg.anchors.validate();
  const auto templates = list_templates(cfg.template_dir);
  const auto lexicons = load_lexicons(cfg.lexicon_dir);
  std::vector<std::string> ids;
  for (const auto& t : templates) ids.push_back(t.template_id);

  Manifest manifest;
  manifest.seed = cfg.seed;
  manifest.counts = cfg.counts;
  manifest.templates = ids;
  manifest.template_set_hash = hex64(template_set_hash(templates));
  manifest.lexicon_hash = hex64(lexicon_hash(lexicons));
  manifest.grid = cfg.grid;
  manifest.anchors = cfg.anchors;
  manifest.documents = plan_corpus(cfg.counts, cfg.seed, ids);
  manifest.ocr_dpi = cfg.ocr_dpi;

  const auto docs_dir = cfg.out_dir / kDocumentsDir;
  std::filesystem::create_directories(docs_dir);

  CommandResult result;
  ordered_parallel(
      manifest.documents.size(), cfg.jobs,
      [&](std::size_t i) {
        const auto& entry = manifest.documents[i];
        DocFiles files;
        try {
          const Template& tpl = templates[i % templates.size()];
          const InvoiceRecord record = synth_record(entry.seed, lexicons);
          const LayoutDocument layout = instantiate(record, tpl, entry.seed);
          RenderedDocument rendered = emit_pdf(layout, entry.id);
          const auto violations = validate_annotation(rendered.annotation);
          if (!violations.empty()) {
            throw std::runtime_error("annotation invariant " + violations.front().invariant + " at " +
                                     violations.front().element + ": " + violations.front().detail);
          }
          files.pdf = std::move(rendered.pdf);
          files.json = serialize_annotation(rendered.annotation);
          if (cfg.ocr_dpi) {
            files.tsv = synth_ocr_tsv(rendered.annotation.words, rendered.annotation.page, *cfg.ocr_dpi);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%g\n", *cfg.ocr_dpi);
            files.dpi = buf;
          }
        } catch (const std::exception& e) {
          files.error = entry.id + " (template " + entry.template_id + "): " + e.what();
        }
        return files;
      },
      [&](std::size_t i, DocFiles files) {
        const auto& id = manifest.documents[i].id;
        if (!files.error.empty()) {
          result.errors.push_back(std::move(files.error));
          return;
        }
        write_file_atomic(docs_dir / (id + ".pdf"), files.pdf);
        write_file_atomic(docs_dir / (id + ".json"), files.json);
        if (cfg.ocr_dpi) {
          write_file_atomic(docs_dir / (id + ".ocr.tsv"), files.tsv);
          write_file_atomic(docs_dir / (id + ".dpi"), files.dpi);
        }
        ++result.processed;
      });
  manifest.save(cfg.out_dir);
  return result;
}

CommandResult cmd_gridify(const std::filesystem::path& corpus_dir, InputKind kind, const EmbeddingSource& embedding,
                          unsigned jobs, WordSource word_source) {
  Manifest manifest = Manifest::load(corpus_dir);
  std::string tag = "none";
  std::unique_ptr<EmbeddingProvider> provider;
  if (kind == InputKind::Wordgrid) {
    provider = make_provider(embedding, manifest.grid.embed_dim, tag);
    manifest.grid.embed_dim = static_cast<std::uint32_t>(provider->dim());
  }
  const auto docs_dir = corpus_dir / kDocumentsDir;
  const auto out_dir = corpus_dir / kTensorsDir;
  std::filesystem::create_directories(out_dir);

  struct Out {
    std::string bytes, error;
  };
  CommandResult result;
  ordered_parallel(
      manifest.documents.size(), jobs,
      [&](std::size_t i) {
        const auto& entry = manifest.documents[i];
        Out out;
        try {
          const auto path = docs_dir / (entry.id + ".json");
          if (!std::filesystem::exists(path)) throw std::runtime_error("missing annotation " + path.string());
          const auto ann = parse_annotation(read_file_bytes(path));
          const auto words = words_for(ann, word_source, docs_dir);
          const Grid g = kind == InputKind::Chargrid ? build_chargrid(words, ann.page, manifest.grid)
                                                     : build_wordgrid(words, ann.page, manifest.grid, *provider);
          out.bytes = encode_tensor(g);
        } catch (const std::exception& e) {
          out.error = entry.id + ": " + e.what();
        }
        return out;
      },
      [&](std::size_t i, Out out) {
        if (!out.error.empty()) {
          result.errors.push_back(std::move(out.error));
          return;
        }
        const auto& id = manifest.documents[i].id;
        write_file_atomic(out_dir / (id + "." + std::string(to_string(kind)) + ".t"), out.bytes);
        ++result.processed;
      });

  TensorInfo info = manifest.tensors.value_or(TensorInfo{});
  info.input_kind = kind;
  info.embedding = tag;
  info.inputs = true;
  manifest.tensors = info;
  manifest.save(corpus_dir);
  return result;
}

CommandResult cmd_targets(const std::filesystem::path& corpus_dir, unsigned jobs) {
  Manifest manifest = Manifest::load(corpus_dir);
  const auto docs_dir = corpus_dir / kDocumentsDir;
  const auto out_dir = corpus_dir / kTensorsDir;
  std::filesystem::create_directories(out_dir);

  struct Out {
    std::string sem, mask, deltas, error;
  };
  CommandResult result;
  ordered_parallel(
      manifest.documents.size(), jobs,
      [&](std::size_t i) {
        const auto& entry = manifest.documents[i];
        Out out;
        try {
          const auto path = docs_dir / (entry.id + ".json");
          if (!std::filesystem::exists(path)) throw std::runtime_error("missing annotation " + path.string());
          const auto ann = parse_annotation(read_file_bytes(path));
          out.sem = encode_tensor(rasterize_semantic(ann.fields, ann.page, manifest.grid, manifest.schema));
          const BoxTargets boxes = encode_boxes(box_targets_for(ann, manifest.grid), manifest.anchors, manifest.grid);
          out.mask = encode_tensor(boxes.box_mask);
          out.deltas = encode_tensor(boxes.box_deltas);
        } catch (const std::exception& e) {
          out.error = entry.id + ": " + e.what();
        }
        return out;
      },
      [&](std::size_t i, Out out) {
        if (!out.error.empty()) {
          result.errors.push_back(std::move(out.error));
          return;
        }
        const auto& id = manifest.documents[i].id;
        write_file_atomic(out_dir / (id + ".sem.t"), out.sem);
        write_file_atomic(out_dir / (id + ".boxmask.t"), out.mask);
        write_file_atomic(out_dir / (id + ".boxdelta.t"), out.deltas);
        ++result.processed;
      });

  TensorInfo info = manifest.tensors.value_or(TensorInfo{});
  info.targets = true;
  if (!manifest.tensors) info.embedding = "none";
  manifest.tensors = info;
  manifest.save(corpus_dir);
  return result;
}

CommandResult cmd_validate(const std::filesystem::path& corpus_dir) {
  const Manifest manifest = Manifest::load(corpus_dir);
  const auto docs_dir = corpus_dir / kDocumentsDir;
  CommandResult result;
  for (const auto& entry : manifest.documents) {
    try {
      const auto pdf = docs_dir / (entry.id + ".pdf");
      if (!std::filesystem::exists(pdf)) throw std::runtime_error("missing " + pdf.string());
      if (read_file_bytes(pdf).rfind("%PDF-1.4", 0) != 0) throw std::runtime_error(pdf.string() + " is not a PDF 1.4 file");
      const auto ann = parse_annotation(read_file_bytes(docs_dir / (entry.id + ".json")));
      if (ann.doc_id != entry.id) throw std::runtime_error("annotation doc_id '" + ann.doc_id + "' != manifest id");
      for (const auto& v : validate_annotation(ann)) {
        result.errors.push_back(entry.id + ": " + v.invariant + " at " + v.element + ": " + v.detail);
      }
    } catch (const std::exception& e) {
      result.errors.push_back(entry.id + ": " + e.what());
    }
    ++result.processed;
  }
  return result;
}

}  // namespace invgrid
