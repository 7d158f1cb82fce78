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


#include <doctest.h>

#include <nlohmann/json.hpp>

#include "invgrid/corpus.hpp"
#include "support.hpp"

using testsupport::run_cli;

namespace {

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

std::filesystem::path fixture() { return testsupport::source_dir() / "tests" / "fixtures" / "currency_clip"; }

}  // namespace

TEST_CASE("help and bad arguments") {
  std::string out;
  CHECK(run_cli("--help", &out) == 0);
  for (const char* sub : {"generate", "gridify", "targets", "oracle-eval", "eval", "validate"}) {
    CHECK(out.find(sub) != std::string::npos);
  }
  CHECK(run_cli("", &out) != 0);
  CHECK(run_cli("frobnicate", &out) != 0);
  CHECK(run_cli("gridify", &out) != 0);
  CHECK(run_cli("eval " + q(fixture()), &out) != 0);
  CHECK(run_cli("gridify x --kind pixels", &out) != 0);
  CHECK(run_cli("validate", &out) == 2);
}

TEST_CASE("full command-line pipeline") {
  testsupport::TempDir tmp("cli");
  const auto dir = tmp / "c";
  std::string out;
  REQUIRE(run_cli("generate -o " + q(dir) + " --train 3 --val 1 --test 2 --seed 5 -j 2", &out) == 0);
  CHECK(out.find("6 documents, 0 errors") != std::string::npos);
  REQUIRE(run_cli("gridify " + q(dir) + " --kind chargrid", &out) == 0);
  REQUIRE(run_cli("targets " + q(dir) + " -j 2", &out) == 0);
  CHECK(run_cli("validate " + q(dir), &out) == 0);

  REQUIRE(run_cli("oracle-eval " + q(dir), &out) == 0);
  CHECK(out.find("invoice-number") != std::string::npos);
  CHECK(out.find("item-names") != std::string::npos);
  CHECK(out.find("Ground Truth Mask") != std::string::npos);

  REQUIRE(run_cli("oracle-eval " + q(dir) + " --report " + q(tmp / "oracle.json"), &out) == 0);
  REQUIRE(run_cli("eval " + q(dir) + " --pred-dir " + q(dir / "tensors") + " --report " + q(tmp / "eval.json"), &out) == 0);
  const auto a = nlohmann::json::parse(testsupport::slurp(tmp / "oracle.json"));
  const auto b = nlohmann::json::parse(testsupport::slurp(tmp / "eval.json"));
  CHECK(a["fields"] == b["fields"]);
  CHECK(a["documents"] == 6);
  for (const auto& f : a["fields"]) CHECK(f["positives"] == f["occurrences"]);
}

TEST_CASE("json output and threshold flag") {
  testsupport::TempDir tmp("clijson");
  std::string out;
  REQUIRE(run_cli("eval " + q(fixture()) + " --pred-dir " + q(fixture() / "pred") + " --json", &out) == 0);
  const auto strict = nlohmann::json::parse(out);
  REQUIRE(run_cli("eval " + q(fixture()) + " --pred-dir " + q(fixture() / "pred") + " --threshold 0.25 --json", &out) ==
          0);
  const auto loose = nlohmann::json::parse(out);
  CHECK(strict["threshold"] == 0.5);
  CHECK(loose["threshold"] == 0.25);
  int strict_pos = 0, loose_pos = 0;
  for (const auto& f : strict["fields"]) strict_pos += f["positives"].get<int>();
  for (const auto& f : loose["fields"]) loose_pos += f["positives"].get<int>();
  CHECK(strict_pos == 6);
  CHECK(loose_pos == 8);
}

TEST_CASE("per-document failures give a nonzero exit and continue") {
  testsupport::TempDir tmp("clifail");
  const auto dir = tmp / "c";
  std::string out;
  REQUIRE(run_cli("generate -o " + q(dir) + " --train 0 --val 0 --test 3", &out) == 0);
  std::filesystem::remove(dir / "documents" / "doc-000001.json");
  CHECK(run_cli("gridify " + q(dir), &out) == 1);
  CHECK(out.find("doc-000001") != std::string::npos);
  CHECK(out.find("2 documents, 1 errors") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "tensors" / "doc-000002.chargrid.t"));
  CHECK(run_cli("validate " + q(dir), &out) == 1);
}

TEST_CASE("config file and template validation") {
  testsupport::TempDir tmp("clicfg");
  testsupport::spit(tmp / "cfg.json", R"({"counts": {"train": 1, "val": 0, "test": 1}, "seed": 3})");
  std::string out;
  REQUIRE(run_cli("generate --config " + q(tmp / "cfg.json") + " -o " + q(tmp / "c"), &out) == 0);
  CHECK(invgrid::Manifest::load(tmp / "c").documents.size() == 2);
  CHECK(invgrid::Manifest::load(tmp / "c").seed == 3);

  testsupport::spit(tmp / "bad.json", R"({"counts": {"train": -4}})");
  CHECK(run_cli("generate --config " + q(tmp / "bad.json") + " -o " + q(tmp / "d"), &out) == 1);
  CHECK(out.find("counts.train") != std::string::npos);

  CHECK(run_cli("validate --templates " + q(testsupport::source_dir() / "templates"), &out) == 0);
  CHECK(out.find("10 valid") != std::string::npos);
  std::filesystem::create_directories(tmp / "tpl");
  testsupport::spit(tmp / "tpl" / "broken.json", "{\"template_id\": 3}");
  CHECK(run_cli("validate --templates " + q(tmp / "tpl"), &out) == 1);
}
