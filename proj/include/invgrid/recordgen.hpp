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
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "invgrid/docmodel.hpp"

namespace invgrid {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Word lists the record synthesizer draws from. Entries are single-spaced,
/// trimmed, printable text.
struct Lexicons {
  std::vector<std::string> company_names;
  std::vector<std::string> street_names;
  std::vector<std::string> cities;
  std::vector<std::string> product_nouns;
};

// One entry per line, `#` starts a comment line, blank lines skipped.
std::vector<std::string> parse_lexicon(std::string_view text);
std::vector<std::string> load_lexicon_file(const std::filesystem::path& path);
// Reads companies.txt, streets.txt, cities.txt, products.txt from `dir`.
Lexicons load_lexicons(const std::filesystem::path& dir);
// $INVGRID_LEXICON_DIR if set, otherwise the lexicons shipped with the source tree.
std::filesystem::path default_lexicon_dir();
std::uint64_t lexicon_hash(const Lexicons& lex);

struct Date {
  int year = 2000;
  unsigned month = 1;
  unsigned day = 1;

  friend bool operator==(const Date&, const Date&) = default;
};

// DD.MM.YYYY
std::string format_date(const Date& d);

using Cents = std::int64_t;

// "{units},{cc} {symbol}" with a comma decimal separator, e.g. "12,50 €".
std::string format_amount(Cents cents, std::string_view currency_symbol);

struct LineItem {
  std::string name;
  std::int64_t quantity = 1;
  Cents unit_price = 0;
  Cents amount = 0;

  friend bool operator==(const LineItem&, const LineItem&) = default;
};

inline constexpr std::size_t kMaxLineItems = 8;

struct InvoiceRecord {
  std::string company_name;
  std::vector<std::string> company_address;  // 2-3 lines
  std::string invoice_number;                 // INV-nnnnnn
  Date invoice_date;
  std::vector<LineItem> line_items;  // 1-8 entries
  Cents invoice_amount = 0;
  std::string currency_symbol = "€";

  friend bool operator==(const InvoiceRecord&, const InvoiceRecord&) = default;
};

// Deterministic in (seed, lexicons). Throws ConfigError on an empty lexicon.
InvoiceRecord synth_record(std::uint64_t seed, const Lexicons& lexicons);

// Header labels map to one value, line-item labels to one value per row.
std::map<FieldLabel, std::vector<std::string>> record_to_field_values(const InvoiceRecord& record);

// Checks the arithmetic and format invariants; returns human-readable problems.
std::vector<std::string> check_record(const InvoiceRecord& record);

nlohmann::json to_json(const InvoiceRecord& record);
InvoiceRecord record_from_json(const nlohmann::json& j);

}  // namespace invgrid
