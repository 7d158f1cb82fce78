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

#include "invgrid/recordgen.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "invgrid/rng.hpp"
#include "invgrid/utf8.hpp"

namespace invgrid {

namespace {

// Independent random streams per record aspect, so adding a draw to one
// aspect does not shift the others.
enum Stream : std::uint64_t { kCompany = 1, kAddress, kNumber, kDate, kItems };

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read lexicon file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_nonempty(const std::vector<std::string>& list, const char* name) {
  if (list.empty()) throw ConfigError(std::string("lexicon '") + name + "' is empty");
}

unsigned days_in_month(int year, unsigned month) {
  using namespace std::chrono;
  const year_month_day_last last{std::chrono::year{year} / std::chrono::month{month} / std::chrono::last};
  return static_cast<unsigned>(last.day());
}

}  // namespace

std::vector<std::string> parse_lexicon(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line = normalize_whitespace(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') out.push_back(std::move(line));
    pos = end + 1;
  }
  return out;
}

std::vector<std::string> load_lexicon_file(const std::filesystem::path& path) {
  return parse_lexicon(read_file(path));
}

Lexicons load_lexicons(const std::filesystem::path& dir) {
  Lexicons lex;
  lex.company_names = load_lexicon_file(dir / "companies.txt");
  lex.street_names = load_lexicon_file(dir / "streets.txt");
  lex.cities = load_lexicon_file(dir / "cities.txt");
  lex.product_nouns = load_lexicon_file(dir / "products.txt");
  return lex;
}

std::filesystem::path default_lexicon_dir() {
  if (const char* env = std::getenv("INVGRID_LEXICON_DIR"); env && *env) return env;
  return std::filesystem::path(INVGRID_DATA_DIR) / "lexicons";
}

std::uint64_t lexicon_hash(const Lexicons& lex) {
  std::uint64_t h = fnv1a64("");
  for (const auto* list : {&lex.company_names, &lex.street_names, &lex.cities, &lex.product_nouns}) {
    for (const auto& e : *list) {
      h = fnv1a64(e, h);
      h = fnv1a64("\n", h);
    }
    h = fnv1a64("\x1e", h);
  }
  return h;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02u.%02u.%04d", d.day, d.month, d.year);
  return buf;
}

std::string format_amount(Cents cents, std::string_view currency_symbol) {
  const bool negative = cents < 0;
  const Cents mag = negative ? -cents : cents;
  std::string out = negative ? "-" : "";
  out += std::to_string(mag / 100);
  out += ',';
  const Cents frac = mag % 100;
  if (frac < 10) out += '0';
  out += std::to_string(frac);
  out += ' ';
  out += currency_symbol;
  return out;
}

InvoiceRecord synth_record(std::uint64_t seed, const Lexicons& lexicons) {
  require_nonempty(lexicons.company_names, "company names");
  require_nonempty(lexicons.street_names, "street names");
  require_nonempty(lexicons.cities, "cities");
  require_nonempty(lexicons.product_nouns, "product nouns");

  InvoiceRecord rec;

  Rng company(mix_seed(seed, kCompany));
  rec.company_name = company.pick(lexicons.company_names);

  Rng address(mix_seed(seed, kAddress));
  rec.company_address.push_back(address.pick(lexicons.street_names) + " " +
                                std::to_string(address.uniform(1, 199)));
  if (address.chance(0.35)) {
    rec.company_address.push_back("Suite " + std::to_string(address.uniform(100, 499)));
  }
  char zip[8];
  std::snprintf(zip, sizeof zip, "%05lld", static_cast<long long>(address.uniform(1067, 99998)));
  rec.company_address.push_back(std::string(zip) + " " + address.pick(lexicons.cities));

  Rng number(mix_seed(seed, kNumber));
  char inv[16];
  std::snprintf(inv, sizeof inv, "INV-%06lld", static_cast<long long>(number.uniform(0, 999999)));
  rec.invoice_number = inv;

  Rng date(mix_seed(seed, kDate));
  rec.invoice_date.year = static_cast<int>(date.uniform(2015, 2024));
  rec.invoice_date.month = static_cast<unsigned>(date.uniform(1, 12));
  rec.invoice_date.day = static_cast<unsigned>(
      date.uniform(1, days_in_month(rec.invoice_date.year, rec.invoice_date.month)));

  Rng items(mix_seed(seed, kItems));
  const auto count = items.uniform(1, static_cast<std::int64_t>(kMaxLineItems));
  for (std::int64_t i = 0; i < count; ++i) {
    LineItem item;
    item.name = items.pick(lexicons.product_nouns);
    item.quantity = items.uniform(1, 30);
    item.unit_price = items.uniform(100, 99999);
    item.amount = item.quantity * item.unit_price;
    rec.invoice_amount += item.amount;
    rec.line_items.push_back(std::move(item));
  }
  return rec;
}

std::map<FieldLabel, std::vector<std::string>> record_to_field_values(const InvoiceRecord& record) {
  std::map<FieldLabel, std::vector<std::string>> out;
  out[FieldLabel::CompanyName] = {record.company_name};
  std::string address;
  for (const auto& line : record.company_address) {
    if (!address.empty()) address += ' ';
    address += line;
  }
  out[FieldLabel::CompanyAddress] = {address};
  out[FieldLabel::InvoiceNumber] = {record.invoice_number};
  out[FieldLabel::InvoiceAmount] = {format_amount(record.invoice_amount, record.currency_symbol)};
  out[FieldLabel::InvoiceDate] = {format_date(record.invoice_date)};
  auto& names = out[FieldLabel::ItemName];
  auto& quantities = out[FieldLabel::ItemQuantity];
  auto& amounts = out[FieldLabel::ItemAmount];
  for (const auto& item : record.line_items) {
    names.push_back(item.name);
    quantities.push_back(std::to_string(item.quantity));
    amounts.push_back(format_amount(item.amount, record.currency_symbol));
  }
  return out;
}

std::vector<std::string> check_record(const InvoiceRecord& record) {
  std::vector<std::string> problems;
  static const std::regex kNumber("INV-[0-9]{6}");
  if (!std::regex_match(record.invoice_number, kNumber)) {
    problems.push_back("invoice number '" + record.invoice_number + "' does not match INV-nnnnnn");
  }
  if (record.company_address.size() < 2 || record.company_address.size() > 3) {
    problems.push_back("address must have 2-3 lines");
  }
  if (record.line_items.empty() || record.line_items.size() > kMaxLineItems) {
    problems.push_back("line item count out of range");
  }
  Cents total = 0;
  for (std::size_t i = 0; i < record.line_items.size(); ++i) {
    const auto& item = record.line_items[i];
    if (item.quantity <= 0) problems.push_back("item " + std::to_string(i) + ": quantity not positive");
    if (item.amount != item.quantity * item.unit_price) {
      problems.push_back("item " + std::to_string(i) + ": amount != quantity x unit price");
    }
    total += item.amount;
  }
  if (total != record.invoice_amount) problems.push_back("invoice amount != sum of item amounts");
  if (utf8::length(record.currency_symbol) != 1) problems.push_back("currency symbol must be one character");
  const auto& d = record.invoice_date;
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
    problems.push_back("invalid invoice date");
  }
  return problems;
}

nlohmann::json to_json(const InvoiceRecord& record) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : record.line_items) {
    items.push_back({{"name", item.name},
                     {"quantity", item.quantity},
                     {"unit_price_cents", item.unit_price},
                     {"amount_cents", item.amount}});
  }
  return {
      {"company_name", record.company_name},
      {"company_address", record.company_address},
      {"invoice_number", record.invoice_number},
      {"invoice_date", format_date(record.invoice_date)},
      {"line_items", std::move(items)},
      {"invoice_amount_cents", record.invoice_amount},
      {"currency_symbol", record.currency_symbol},
  };
}

InvoiceRecord record_from_json(const nlohmann::json& j) {
  InvoiceRecord rec;
  rec.company_name = j.at("company_name").get<std::string>();
  rec.company_address = j.at("company_address").get<std::vector<std::string>>();
  rec.invoice_number = j.at("invoice_number").get<std::string>();
  const auto date = j.at("invoice_date").get<std::string>();
  unsigned d = 0, m = 0;
  int y = 0;
  if (std::sscanf(date.c_str(), "%2u.%2u.%4d", &d, &m, &y) != 3) {
    throw std::invalid_argument("invoice_date must be DD.MM.YYYY, got '" + date + "'");
  }
  rec.invoice_date = {y, m, d};
  for (const auto& ji : j.at("line_items")) {
    rec.line_items.push_back({ji.at("name").get<std::string>(), ji.at("quantity").get<std::int64_t>(),
                              ji.at("unit_price_cents").get<Cents>(), ji.at("amount_cents").get<Cents>()});
  }
  rec.invoice_amount = j.at("invoice_amount_cents").get<Cents>();
  rec.currency_symbol = j.at("currency_symbol").get<std::string>();
  return rec;
}

}  // namespace invgrid
