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

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "invgrid/alloc.hpp"
#include "invgrid/corpus.hpp"
#include "invgrid/evaluate.hpp"
#include "invgrid/layout.hpp"
#include "invgrid/tensorio.hpp"

namespace {

using namespace invgrid;

int report_errors(const CommandResult& result, const std::string& what) {
  for (const auto& e : result.errors) std::cerr << "error: " << e << "\n";
  std::cerr << what << ": " << result.processed << " documents, " << result.errors.size() << " errors\n";
  return result.exit_code();
}

struct EvalFlags {
  std::string corpus;
  std::string word_source = "exact";
  double threshold = kDefaultOverlapThreshold;
  std::size_t min_area = kDefaultMinComponentArea;
  unsigned jobs = 1;
  bool json = false;
  std::string report;
};

void add_eval_flags(CLI::App* cmd, EvalFlags& f) {
  cmd->add_option("corpus", f.corpus, "Corpus directory")->required();
  cmd->add_option("--word-source", f.word_source, "exact | ocr")->check(CLI::IsMember({"exact", "ocr"}));
  cmd->add_option("--threshold", f.threshold, "Minimum word-area fraction inside a region (strict)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--min-area", f.min_area, "Smallest component kept, in cells");
  cmd->add_option("-j,--jobs", f.jobs, "Worker threads");
  cmd->add_flag("--json", f.json, "Print the JSON report instead of the table");
  cmd->add_option("--report", f.report, "Also write the JSON report to this file");
}

int finish_eval(const EvalReport& report, const EvalFlags& f) {
  const std::string json = report.to_json().dump(2) + "\n";
  if (!f.report.empty()) write_file_atomic(f.report, json);
  if (f.json) {
    std::cout << json;
  } else {
    std::cout << report.to_table();
  }
  for (const auto& e : report.errors) std::cerr << "error: " << e << "\n";
  return report.errors.empty() ? 0 : 1;
}

EvalOptions to_options(const EvalFlags& f) {
  EvalOptions o;
  o.word_source = parse_word_source(f.word_source);
  o.threshold = f.threshold;
  o.min_area = f.min_area;
  o.jobs = f.jobs;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  invgrid::tune_allocator();
  CLI::App app{"Synthetic invoice corpus generation, grid encoding and field-accuracy evaluation"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate PDFs, annotations and a manifest");
  std::string config_path, out_dir, template_dir, lexicon_dir;
  std::uint64_t train = 0, val = 0, test = 0, seed = 0;
  unsigned gen_jobs = 1;
  double ocr_dpi = 0;
  gen->add_option("--config", config_path, "JSON config file; flags override it");
  gen->add_option("-o,--out", out_dir, "Output corpus directory");
  gen->add_option("--templates", template_dir, "Template directory (env INVGRID_TEMPLATE_DIR)");
  gen->add_option("--lexicons", lexicon_dir, "Lexicon directory (env INVGRID_LEXICON_DIR)");
  gen->add_option("--train", train, "Training documents (default 8000)");
  gen->add_option("--val", val, "Validation documents (default 1000)");
  gen->add_option("--test", test, "Test documents (default 3000)");
  gen->add_option("--seed", seed, "Corpus seed");
  gen->add_option("-j,--jobs", gen_jobs, "Worker threads");
  gen->add_option("--ocr-dpi", ocr_dpi, "Also write synthetic OCR TSV files at this DPI")->check(CLI::PositiveNumber);

  // gridify
  auto* grid = app.add_subcommand("gridify", "Encode documents as chargrid or wordgrid tensors");
  std::string grid_corpus, kind = "chargrid", embedding = "hashed", grid_words = "exact";
  unsigned grid_jobs = 1;
  grid->add_option("corpus", grid_corpus, "Corpus directory")->required();
  grid->add_option("--kind", kind, "chargrid | wordgrid")->check(CLI::IsMember({"chargrid", "wordgrid"}));
  grid->add_option("--embedding", embedding, "'hashed' or a path to an embedding sidecar file");
  grid->add_option("--words", grid_words, "exact | ocr")->check(CLI::IsMember({"exact", "ocr"}));
  grid->add_option("-j,--jobs", grid_jobs, "Worker threads");

  // targets
  auto* tgt = app.add_subcommand("targets", "Build semantic masks and anchor box targets");
  std::string tgt_corpus;
  unsigned tgt_jobs = 1;
  tgt->add_option("corpus", tgt_corpus, "Corpus directory")->required();
  tgt->add_option("-j,--jobs", tgt_jobs, "Worker threads");

  // oracle-eval / eval
  auto* oracle = app.add_subcommand("oracle-eval", "Score ground-truth masks through the extraction pipeline");
  EvalFlags oracle_flags;
  add_eval_flags(oracle, oracle_flags);

  auto* ev = app.add_subcommand("eval", "Score predicted class-index masks");
  EvalFlags eval_flags;
  std::string pred_dir;
  add_eval_flags(ev, eval_flags);
  ev->add_option("--pred-dir", pred_dir, "Directory of {id}.sem.t prediction masks")->required();

  // validate
  auto* val_cmd = app.add_subcommand("validate", "Check annotations of a corpus, or a template directory");
  std::string val_corpus, val_templates;
  val_cmd->add_option("corpus", val_corpus, "Corpus directory");
  val_cmd->add_option("--templates", val_templates, "Validate every template in this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      CorpusConfig cfg;
      if (!config_path.empty()) cfg = load_config(config_path);
      if (gen->count("--out")) cfg.out_dir = out_dir;
      if (gen->count("--templates")) cfg.template_dir = template_dir;
      if (gen->count("--lexicons")) cfg.lexicon_dir = lexicon_dir;
      if (gen->count("--train")) cfg.counts.train = train;
      if (gen->count("--val")) cfg.counts.val = val;
      if (gen->count("--test")) cfg.counts.test = test;
      if (gen->count("--seed")) cfg.seed = seed;
      if (gen->count("--jobs")) cfg.jobs = gen_jobs;
      if (gen->count("--ocr-dpi")) cfg.ocr_dpi = ocr_dpi;
      return report_errors(cmd_generate(cfg), "generate");
    }
    if (*grid) {
      EmbeddingSource src;
      if (embedding != "hashed") src = {false, embedding};
      return report_errors(cmd_gridify(grid_corpus, parse_input_kind(kind), src, grid_jobs, parse_word_source(grid_words)),
                           "gridify");
    }
    if (*tgt) return report_errors(cmd_targets(tgt_corpus, tgt_jobs), "targets");
    if (*oracle) return finish_eval(oracle_eval(oracle_flags.corpus, to_options(oracle_flags)), oracle_flags);
    if (*ev) return finish_eval(eval_predictions(eval_flags.corpus, pred_dir, to_options(eval_flags)), eval_flags);
    if (*val_cmd) {
      if (val_corpus.empty() && val_templates.empty()) {
        std::cerr << "validate: give a corpus directory and/or --templates\n";
        return 2;
      }
      int rc = 0;
      if (!val_templates.empty()) {
        const auto templates = list_templates(val_templates);
        std::cerr << "templates: " << templates.size() << " valid\n";
      }
      if (!val_corpus.empty()) rc = report_errors(cmd_validate(val_corpus), "validate");
      return rc;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
