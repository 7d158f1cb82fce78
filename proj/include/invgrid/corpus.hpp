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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invgrid/evaluate.hpp"
#include "invgrid/gridify.hpp"
#include "invgrid/targets.hpp"

namespace invgrid {

enum class Split { Train, Val, Test };
std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view name);

struct SplitCounts {
  std::uint64_t train = 8000;
  std::uint64_t val = 1000;
  std::uint64_t test = 3000;

  std::uint64_t total() const noexcept { return train + val + test; }
  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

struct EmbeddingSource {
  bool hashed = true;
  std::filesystem::path sidecar;  // used when !hashed
};

struct CorpusConfig {
  std::filesystem::path out_dir = "corpus";
  std::filesystem::path template_dir = default_template_dir();
  std::filesystem::path lexicon_dir = default_lexicon_dir();
  SplitCounts counts;
  std::uint64_t seed = 0;
  GridConfig grid;
  AnchorSet anchors;
  InputKind input_kind = InputKind::Chargrid;
  EmbeddingSource embedding;
  // When set, each document also gets a synthetic {id}.ocr.tsv + {id}.dpi.
  std::optional<double> ocr_dpi;
  unsigned jobs = 1;
};

// Keys mirror the struct fields; missing keys keep their defaults.
void apply_config_json(CorpusConfig& cfg, const nlohmann::json& j);
CorpusConfig load_config(const std::filesystem::path& path);

struct DocumentEntry {
  std::string id;
  std::string template_id;
  std::uint64_t seed = 0;
  Split split = Split::Train;

  friend bool operator==(const DocumentEntry&, const DocumentEntry&) = default;
};

std::string document_id(std::size_t index);
// Per-document seed: the corpus seed mixed with the document index via splitmix64.
std::uint64_t document_seed(std::uint64_t corpus_seed, std::size_t index);
// Round-robin templates, splits by index range in generation order.
std::vector<DocumentEntry> plan_corpus(const SplitCounts& counts, std::uint64_t seed,
                                       const std::vector<std::string>& template_ids);

struct TensorInfo {
  InputKind input_kind = InputKind::Chargrid;
  std::string embedding;  // "hashed" or "sidecar:<fnv64 hex>"
  bool inputs = false;    // gridify ran
  bool targets = false;   // targets ran
};

/// Corpus manifest (manifest.json at the corpus root). Schema in docs/formats.md.
struct Manifest {
  std::uint64_t seed = 0;
  SplitCounts counts;
  std::vector<std::string> templates;
  std::string template_set_hash;
  std::string lexicon_hash;
  GridConfig grid;
  FieldSchema schema;
  AnchorSet anchors;
  std::vector<DocumentEntry> documents;
  std::optional<double> ocr_dpi;
  std::optional<TensorInfo> tensors;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
  static Manifest load(const std::filesystem::path& corpus_dir);
  void save(const std::filesystem::path& corpus_dir) const;
};

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kDocumentsDir = "documents";
inline constexpr const char* kTensorsDir = "tensors";

std::string hex64(std::uint64_t v);

struct CommandResult {
  std::vector<std::string> errors;
  std::size_t processed = 0;
  int exit_code() const noexcept { return errors.empty() ? 0 : 1; }
};

// Documents, annotations (and optional OCR sidecars) plus the manifest.
CommandResult cmd_generate(const CorpusConfig& cfg);
// Input grids ({id}.chargrid.t or {id}.wordgrid.t) under tensors/.
CommandResult cmd_gridify(const std::filesystem::path& corpus_dir, InputKind kind, const EmbeddingSource& embedding,
                          unsigned jobs, WordSource words = WordSource::Exact);
// Semantic mask and box targets under tensors/.
CommandResult cmd_targets(const std::filesystem::path& corpus_dir, unsigned jobs);
// Annotation invariants for every document, plus the recorded template set.
CommandResult cmd_validate(const std::filesystem::path& corpus_dir);

}  // namespace invgrid
