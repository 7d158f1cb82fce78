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

#include <chrono>
#include <regex>

#include "invgrid/recordgen.hpp"
#include "support.hpp"

using namespace invgrid;

namespace {

const Lexicons& lex() {
  static const Lexicons l = load_lexicons(default_lexicon_dir());
  return l;
}

bool valid_calendar_date(const Date& d) {
  using namespace std::chrono;
  return year_month_day{year{d.year}, month{d.month}, day{d.day}}.ok();
}

}  // namespace

TEST_CASE("format_amount renders cents with a comma and a trailing symbol") {
  CHECK(format_amount(1250, "€") == "12,50 €");
  CHECK(format_amount(5, "€") == "0,05 €");
  CHECK(format_amount(100, "€") == "1,00 €");
  CHECK(format_amount(123456, "$") == "1234,56 $");
  CHECK(format_amount(-1250, "€") == "-12,50 €");
}

TEST_CASE("format_date is DD.MM.YYYY") {
  CHECK(format_date(Date{2021, 3, 7}) == "07.03.2021");
  CHECK(format_date(Date{1999, 12, 31}) == "31.12.1999");
}

TEST_CASE("parse_lexicon skips comments and blank lines") {
  const auto entries = parse_lexicon("# header\nAlpha GmbH\n\n  Beta  \n# tail\r\nGamma\r\n");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0] == "Alpha GmbH");
  CHECK(entries[1] == "Beta");
  CHECK(entries[2] == "Gamma");
}

TEST_CASE("shipped lexicons are non-empty") {
  CHECK_FALSE(lex().company_names.empty());
  CHECK_FALSE(lex().street_names.empty());
  CHECK_FALSE(lex().cities.empty());
  CHECK_FALSE(lex().product_nouns.empty());
}

TEST_CASE("empty lexicon is a configuration error") {
  Lexicons l = lex();
  l.product_nouns.clear();
  CHECK_THROWS_AS(synth_record(1, l), ConfigError);
  testsupport::TempDir dir("lex");
  CHECK_THROWS_AS(load_lexicons(dir.path()), ConfigError);
}

TEST_CASE("synth_record is deterministic") {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL}) {
    CHECK(to_json(synth_record(seed, lex())).dump() == to_json(synth_record(seed, lex())).dump());
  }
  CHECK(synth_record(1, lex()) != synth_record(2, lex()));
}

TEST_CASE("seed 42 matches the frozen golden record") {
  const std::string golden = testsupport::slurp(testsupport::source_dir() / "golden" / "record_42.json");
  REQUIRE_FALSE(golden.empty());
  CHECK(to_json(synth_record(42, lex())).dump(1) + "\n" == golden);
  CHECK(record_from_json(nlohmann::json::parse(golden)) == synth_record(42, lex()));
}

TEST_CASE("record invariants hold for 10000 seeds") {
  const std::regex inv_re("INV-[0-9]{6}");
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto r = synth_record(seed * 7919 + 3, lex());
    Cents total = 0;
    bool ok = r.line_items.size() >= 1 && r.line_items.size() <= 8;
    for (const auto& it : r.line_items) {
      ok &= it.quantity > 0 && it.unit_price > 0;
      ok &= it.amount == it.quantity * it.unit_price;
      total += it.amount;
    }
    ok &= total == r.invoice_amount;
    ok &= std::regex_match(r.invoice_number, inv_re);
    ok &= r.company_address.size() >= 2 && r.company_address.size() <= 3;
    ok &= valid_calendar_date(r.invoice_date);
    ok &= r.currency_symbol == "€";
    ok &= check_record(r).empty();
    if (!ok) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("quantities contain the digit 7") {
  std::size_t with7 = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    for (const auto& it : synth_record(seed, lex()).line_items) {
      ++total;
      if (std::to_string(it.quantity).find('7') != std::string::npos) ++with7;
    }
  }
  CHECK(total > 0);
  CHECK(with7 > 0);
}

TEST_CASE("check_record flags broken arithmetic") {
  auto r = synth_record(5, lex());
  r.invoice_amount += 1;
  CHECK_FALSE(check_record(r).empty());
  r = synth_record(5, lex());
  r.line_items[0].amount += 1;
  CHECK_FALSE(check_record(r).empty());
  r = synth_record(5, lex());
  r.invoice_number = "INV-12345";
  CHECK_FALSE(check_record(r).empty());
}

TEST_CASE("record_to_field_values") {
  InvoiceRecord r;
  r.company_name = "Acme";
  r.company_address = {"Main Street 1", "10115 Berlin"};
  r.invoice_number = "INV-000001";
  r.invoice_date = Date{2021, 3, 7};
  r.line_items = {{"Pen", 2, 625, 1250}, {"Ink", 1, 100, 100}, {"Pad", 7, 100, 700}};
  r.invoice_amount = 2050;
  const auto v = record_to_field_values(r);
  CHECK(v.at(FieldLabel::ItemName).size() == 3);
  CHECK(v.at(FieldLabel::ItemAmount).at(0) == "12,50 €");
  CHECK(v.at(FieldLabel::ItemQuantity).at(2) == "7");
  CHECK(v.at(FieldLabel::InvoiceDate).at(0) == "07.03.2021");
  CHECK(v.at(FieldLabel::InvoiceAmount).at(0) == "20,50 €");
  CHECK(v.at(FieldLabel::CompanyAddress).size() == 1);
  CHECK(v.at(FieldLabel::CompanyAddress).at(0) == "Main Street 1 10115 Berlin");
  CHECK(v.at(FieldLabel::CompanyName).size() == 1);
}

TEST_CASE("record JSON round trip") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = synth_record(seed, lex());
    CHECK(record_from_json(to_json(r)) == r);
  }
}
