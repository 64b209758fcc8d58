#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "targetlens/corpus.hpp"
#include "targetlens/error.hpp"

namespace targetlens {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// --- JSON -------------------------------------------------------------------

std::string require_string(const json& row, const char* field) {
  auto it = row.find(field);
  if (it == row.end()) throw SchemaError(fmt::format("missing field '{}'", field));
  if (!it->is_string()) throw SchemaError(fmt::format("field '{}' must be a string", field));
  return it->get<std::string>();
}

double require_number(const json& value, const std::string& field) {
  if (!value.is_number()) throw SchemaError(fmt::format("field '{}' must be a number", field));
  return value.get<double>();
}

Range require_range(const json& row, const char* field) {
  auto it = row.find(field);
  if (it == row.end()) throw SchemaError(fmt::format("missing field '{}'", field));
  if (it->is_number()) {
    const double v = it->get<double>();
    return {v, v};
  }
  if (it->is_array() && it->size() == 2) {
    return {require_number((*it)[0], field), require_number((*it)[1], field)};
  }
  throw SchemaError(fmt::format("field '{}' must be a number or a [lower, upper] pair", field));
}

// Runs `parse` and rethrows schema problems as a ParseError naming the field.
template <typename Fn>
auto with_field(std::size_t row, const std::string& field, Fn&& parse) {
  try {
    return parse();
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(row, field, e.what());
  }
}

AdRecord ad_from_json_row(const json& j, std::size_t row) {
  if (!j.is_object()) throw ParseError(row, "<row>", "expected a JSON object");
  AdRecord ad;
  ad.ad_id = with_field(row, "ad_id", [&] { return require_string(j, "ad_id"); });
  ad.title = with_field(row, "title", [&] { return require_string(j, "title"); });
  ad.description =
      with_field(row, "description", [&] { return require_string(j, "description"); });
  ad.body = with_field(row, "body", [&] { return require_string(j, "body"); });
  ad.funding_entity =
      with_field(row, "funding_entity", [&] { return require_string(j, "funding_entity"); });
  ad.spend = with_field(row, "spend", [&] { return require_range(j, "spend"); });
  ad.impressions =
      with_field(row, "impressions", [&] { return require_range(j, "impressions"); });

  ad.gender_impressions = with_field(row, "gender_impressions", [&] {
    auto it = j.find("gender_impressions");
    if (it == j.end() || !it->is_object()) throw SchemaError("expected an object");
    GenderImpressions g;
    for (const auto& [name, value] : it->items()) {
      const double v = require_number(value, name);
      if (name == "male") {
        g.male = v;
      } else if (name == "female") {
        g.female = v;
      } else if (name == "unknown") {
        g.unknown = v;
      } else {
        throw SchemaError(fmt::format("unknown gender key '{}'", name));
      }
    }
    return g;
  });

  ad.age_impressions = with_field(row, "age_impressions", [&] {
    auto it = j.find("age_impressions");
    if (it == j.end() || !it->is_object()) throw SchemaError("expected an object");
    AgeImpressions bands;
    for (const auto& [name, value] : it->items()) {
      auto band = parse_age_band(name);
      if (!band) throw SchemaError(fmt::format("unknown age band '{}'", name));
      bands[*band] = require_number(value, name);
    }
    return bands;
  });
  return ad;
}

// --- CSV --------------------------------------------------------------------

// RFC 4180 records: quoted fields may hold commas, doubled quotes, newlines.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (in_quotes) throw SchemaError("unterminated quoted field");
  if (any) fields.push_back(std::move(field));
  return any;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

double parse_csv_number(const std::string& cell) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw SchemaError(fmt::format("'{}' is not a number", cell));
  }
  return v;
}

std::vector<std::string> csv_header() {
  std::vector<std::string> h = {"ad_id",           "title",         "description",
                                "body",            "funding_entity", "spend.lower",
                                "spend.upper",     "impressions.lower", "impressions.upper",
                                "gender.male",     "gender.female",  "gender.unknown"};
  for (AgeBand band : kAllAgeBands) h.push_back(fmt::format("age.{}", band_id(band)));
  return h;
}

AdRecord ad_from_csv_row(const std::unordered_map<std::string, std::size_t>& columns,
                         const std::vector<std::string>& cells, std::size_t row) {
  auto cell = [&](const std::string& name) -> const std::string* {
    auto it = columns.find(name);
    if (it == columns.end() || it->second >= cells.size()) return nullptr;
    return &cells[it->second];
  };
  auto text = [&](const std::string& name) {
    const std::string* c = cell(name);
    if (!c) throw ParseError(row, name, "missing column");
    return *c;
  };
  auto number = [&](const std::string& name, bool required) {
    const std::string* c = cell(name);
    if (!c || c->empty()) {
      if (required) throw ParseError(row, name, "missing value");
      return 0.0;
    }
    return with_field(row, name, [&] { return parse_csv_number(*c); });
  };
  auto range = [&](const std::string& base) {
    if (const std::string* point = cell(base); point && !point->empty()) {
      const double v = with_field(row, base, [&] { return parse_csv_number(*point); });
      return Range{v, v};
    }
    return Range{number(base + ".lower", true), number(base + ".upper", true)};
  };

  AdRecord ad;
  ad.ad_id = text("ad_id");
  ad.title = text("title");
  ad.description = text("description");
  ad.body = text("body");
  ad.funding_entity = text("funding_entity");
  ad.spend = range("spend");
  ad.impressions = range("impressions");
  ad.gender_impressions.male = number("gender.male", true);
  ad.gender_impressions.female = number("gender.female", true);
  ad.gender_impressions.unknown = number("gender.unknown", true);
  for (const auto& [name, index] : columns) {
    if (name.rfind("age.", 0) != 0) continue;
    const std::string id = name.substr(4);
    auto band = parse_age_band(id);
    if (!band) throw ParseError(row, name, fmt::format("unknown age band '{}'", id));
    if (index < cells.size() && !cells[index].empty()) {
      ad.age_impressions[*band] = number(name, false);
    }
  }
  return ad;
}

void finish_row(AdRecord ad, std::size_t row, std::set<std::string>& seen,
                std::vector<AdRecord>& out) {
  try {
    validate_ad(ad);
  } catch (const SchemaError& e) {
    const std::string what = e.what();
    std::string field = "<row>";
    if (what.rfind("gender", 0) == 0) {
      field = "gender_impressions";
    } else if (what.rfind("age", 0) == 0) {
      field = "age_impressions";
    } else if (what.rfind("ad_id", 0) == 0) {
      field = "ad_id";
    } else if (what.rfind("spend", 0) == 0) {
      field = "spend";
    } else if (what.rfind("impressions", 0) == 0) {
      field = "impressions";
    } else if (what.find("title") != std::string::npos) {
      field = "title/description/body";
    }
    throw ParseError(row, field, what);
  }
  if (!seen.insert(ad.ad_id).second) throw DuplicateIdError(ad.ad_id);
  out.push_back(std::move(ad));
}

std::vector<AdRecord> parse_jsonl(std::istream& source) {
  std::vector<AdRecord> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(row, "<row>", e.what());
    }
    finish_row(ad_from_json_row(j, row), row, seen, out);
  }
  return out;
}

std::vector<AdRecord> parse_csv(std::istream& source) {
  std::vector<AdRecord> out;
  std::set<std::string> seen;
  std::vector<std::string> cells;
  if (!read_csv_record(source, cells)) return out;
  std::unordered_map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < cells.size(); ++i) columns[cells[i]] = i;
  std::size_t row = 0;
  while (true) {
    bool more = false;
    try {
      more = read_csv_record(source, cells);
    } catch (const SchemaError& e) {
      throw ParseError(row + 1, "<row>", e.what());
    }
    if (!more) break;
    if (cells.size() == 1 && cells[0].empty()) continue;
    ++row;
    finish_row(ad_from_csv_row(columns, cells, row), row, seen, out);
  }
  return out;
}

}  // namespace

std::vector<AdRecord> parse_corpus(std::istream& source, CorpusFormat format) {
  return format == CorpusFormat::kJsonl ? parse_jsonl(source) : parse_csv(source);
}

std::vector<AdRecord> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open corpus file '{}'", path.string()));
  return parse_corpus(in, format);
}

ordered_json to_json(const AdRecord& ad) {
  ordered_json j;
  j["ad_id"] = ad.ad_id;
  j["title"] = ad.title;
  j["description"] = ad.description;
  j["body"] = ad.body;
  j["funding_entity"] = ad.funding_entity;
  j["spend"] = {ad.spend.lower, ad.spend.upper};
  j["impressions"] = {ad.impressions.lower, ad.impressions.upper};
  j["gender_impressions"] = {{"male", ad.gender_impressions.male},
                             {"female", ad.gender_impressions.female},
                             {"unknown", ad.gender_impressions.unknown}};
  ordered_json age = ordered_json::object();
  for (const auto& [band, value] : ad.age_impressions) age[std::string(band_id(band))] = value;
  j["age_impressions"] = std::move(age);
  return j;
}

AdRecord ad_from_json(const json& j) {
  AdRecord ad = ad_from_json_row(j, 1);
  validate_ad(ad);
  return ad;
}

ordered_json to_json(const LabeledAd& ad) {
  ordered_json j = to_json(ad.ad);
  j["gender_target"] = ad.gender_target ? ordered_json(key(*ad.gender_target)) : ordered_json();
  j["age_target"] = ad.age_target ? ordered_json(key(*ad.age_target)) : ordered_json();
  j["exclusivity_threshold"] = ad.exclusivity_threshold;
  return j;
}

LabeledAd labeled_ad_from_json(const json& j) {
  LabeledAd labeled;
  labeled.ad = ad_from_json(j);
  if (auto it = j.find("gender_target"); it != j.end() && !it->is_null()) {
    labeled.gender_target = parse_gender(it->get<std::string>());
    if (!labeled.gender_target) throw SchemaError("invalid gender_target");
  }
  if (auto it = j.find("age_target"); it != j.end() && !it->is_null()) {
    labeled.age_target = parse_age_bucket(it->get<std::string>());
    if (!labeled.age_target) throw SchemaError("invalid age_target");
  }
  labeled.exclusivity_threshold = j.value("exclusivity_threshold", kDefaultExclusivityThreshold);
  return labeled;
}

std::vector<LabeledAd> load_labeled(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open labeled corpus '{}'", path.string()));
  std::vector<LabeledAd> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    try {
      out.push_back(labeled_ad_from_json(json::parse(line)));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(row, "<row>", e.what());
    }
    if (!seen.insert(out.back().ad.ad_id).second) throw DuplicateIdError(out.back().ad.ad_id);
  }
  return out;
}

void write_labeled(std::ostream& out, std::span<const LabeledAd> ads) {
  for (const auto& ad : ads) out << to_json(ad).dump() << '\n';
}

void write_corpus(std::ostream& out, std::span<const AdRecord> ads, CorpusFormat format) {
  if (format == CorpusFormat::kJsonl) {
    for (const auto& ad : ads) out << to_json(ad).dump() << '\n';
    return;
  }
  const auto header = csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& ad : ads) {
    out << csv_escape(ad.ad_id) << ',' << csv_escape(ad.title) << ','
        << csv_escape(ad.description) << ',' << csv_escape(ad.body) << ','
        << csv_escape(ad.funding_entity) << ',';
    out << fmt::format("{},{},{},{},{},{},{}", ad.spend.lower, ad.spend.upper,
                       ad.impressions.lower, ad.impressions.upper, ad.gender_impressions.male,
                       ad.gender_impressions.female, ad.gender_impressions.unknown);
    for (AgeBand band : kAllAgeBands) {
      out << ',';
      if (auto it = ad.age_impressions.find(band); it != ad.age_impressions.end()) {
        out << fmt::format("{}", it->second);
      }
    }
    out << '\n';
  }
}

}  // namespace targetlens
