#include "patentkb/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "patentkb/error.hpp"

namespace patentkb {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Office office) { return office == Office::EP ? "EP" : "US"; }

Office parse_office(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "EP") return Office::EP;
  if (upper == "US") return Office::US;
  throw ValidationError(fmt::format("unknown office '{}' (expected EP or US)", text));
}

namespace {

bool valid_country(const std::string& code) {
  return code.size() == 2 && std::isupper(static_cast<unsigned char>(code[0])) &&
         std::isupper(static_cast<unsigned char>(code[1]));
}

}  // namespace

void validate_record(const PatentRecord& r) {
  if (r.family_id.empty()) throw ValidationError("family_id is empty", 0, "family_id");
  if (r.npl_scientific > r.npl_total)
    throw ValidationError("npl_scientific exceeds npl_total", 0, "npl_scientific");
  std::unordered_set<std::string_view> seen;
  for (const auto& cited : r.cited_family_ids) {
    if (cited.empty()) throw ValidationError("empty cited family id", 0, "cited_family_ids");
    if (cited == r.family_id)
      throw ValidationError("record cites its own family", 0, "cited_family_ids");
    if (!seen.insert(cited).second)
      throw ValidationError(fmt::format("duplicate cited family id '{}'", cited), 0,
                            "cited_family_ids");
  }
  for (const auto& loc : r.inventor_locations) {
    if (!(loc.lat >= -90.0 && loc.lat <= 90.0))
      throw ValidationError(fmt::format("latitude {} out of range", loc.lat), 0,
                            "inventor_locations");
    if (!(loc.lon >= -180.0 && loc.lon < 180.0))
      throw ValidationError(fmt::format("longitude {} out of range", loc.lon), 0,
                            "inventor_locations");
    if (!valid_country(loc.country))
      throw ValidationError(fmt::format("country code '{}' is not uppercase alpha-2", loc.country),
                            0, "inventor_locations");
  }
}

Corpus::Corpus(Office office, std::vector<PatentRecord> records)
    : office_(office), records_(std::move(records)) {
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    validate_record(r);
    if (r.office != office_)
      throw ValidationError(fmt::format("record '{}' belongs to office {}, corpus is {}",
                                        r.family_id, to_string(r.office), to_string(office_)),
                            0, "office");
    if (!index_.emplace(r.family_id, i).second)
      throw ValidationError(fmt::format("duplicate family_id '{}'", r.family_id), 0, "family_id");
  }
}

const PatentRecord* Corpus::find(std::string_view family_id) const {
  auto idx = index_of(family_id);
  return idx ? &records_[*idx] : nullptr;
}

std::optional<std::size_t> Corpus::index_of(std::string_view family_id) const {
  auto it = index_.find(std::string(family_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PatentSet all_patents(const Corpus& corpus) {
  PatentSet out;
  out.reserve(corpus.size());
  for (const auto& r : corpus) out.push_back(&r);
  return out;
}

// ---------------------------------------------------------------------------
// Extract format

namespace {

constexpr std::string_view kRecordKeys[] = {
    "family_id",      "office",         "filing_year", "cpc_codes",         "cited_family_ids",
    "npl_total",      "npl_scientific", "sectors",     "inventor_locations"};
constexpr std::string_view kLocationKeys[] = {"lat", "lon", "country", "region"};

template <std::size_t N>
bool known_key(const std::string& key, const std::string_view (&keys)[N]) {
  return std::find(std::begin(keys), std::end(keys), key) != std::end(keys);
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ValidationError(fmt::format("{}: {}", field, what), 0, field);
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(key, "missing required field");
  return *it;
}

std::string get_string(const nlohmann::json& v, const std::string& field) {
  if (!v.is_string()) field_error(field, "expected a string");
  return v.get<std::string>();
}

std::uint32_t get_count(const nlohmann::json& v, const std::string& field) {
  if (v.is_number_unsigned()) {
    auto n = v.get<std::uint64_t>();
    if (n > UINT32_MAX) field_error(field, "count too large");
    return static_cast<std::uint32_t>(n);
  }
  if (v.is_number_integer()) field_error(field, "must be non-negative");
  field_error(field, "expected a non-negative integer");
}

double get_number(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number()) field_error(field, "expected a number");
  return v.get<double>();
}

std::vector<std::string> get_string_list(const nlohmann::json& v, const std::string& field) {
  if (!v.is_array()) field_error(field, "expected an array of strings");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& item : v) out.push_back(get_string(item, field));
  return out;
}

PatentRecord record_from_json(const nlohmann::json& obj, const ParseOptions& options) {
  if (!obj.is_object()) throw ValidationError("record is not a JSON object");
  if (options.strict) {
    for (const auto& [key, _] : obj.items())
      if (!known_key(key, kRecordKeys)) field_error(key, "unknown key");
  }

  PatentRecord r;
  r.family_id = get_string(require(obj, "family_id"), "family_id");
  r.office = [&] {
    try {
      return parse_office(get_string(require(obj, "office"), "office"));
    } catch (const ValidationError& e) {
      if (!e.field().empty()) throw;
      field_error("office", e.what());
    }
  }();
  if (auto it = obj.find("filing_year"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) field_error("filing_year", "expected an integer year");
    r.filing_year = it->get<int>();
  }
  r.cpc_codes = get_string_list(require(obj, "cpc_codes"), "cpc_codes");

  // Duplicate family-level citations are extract artifacts; keep the first.
  std::unordered_set<std::string> seen;
  for (auto& cited : get_string_list(require(obj, "cited_family_ids"), "cited_family_ids"))
    if (seen.insert(cited).second) r.cited_family_ids.push_back(std::move(cited));

  r.npl_total = get_count(require(obj, "npl_total"), "npl_total");
  r.npl_scientific = get_count(require(obj, "npl_scientific"), "npl_scientific");
  for (auto& s : get_string_list(require(obj, "sectors"), "sectors")) r.sectors.insert(std::move(s));

  const auto& locs = require(obj, "inventor_locations");
  if (!locs.is_array()) field_error("inventor_locations", "expected an array");
  for (const auto& l : locs) {
    if (!l.is_object()) field_error("inventor_locations", "expected location objects");
    if (options.strict) {
      for (const auto& [key, _] : l.items())
        if (!known_key(key, kLocationKeys)) field_error("inventor_locations." + key, "unknown key");
    }
    InventorLocation loc;
    loc.lat = get_number(require(l, "lat"), "inventor_locations.lat");
    loc.lon = get_number(require(l, "lon"), "inventor_locations.lon");
    loc.country = get_string(require(l, "country"), "inventor_locations.country");
    if (auto it = l.find("region"); it != l.end() && !it->is_null())
      loc.region = get_string(*it, "inventor_locations.region");
    r.inventor_locations.push_back(std::move(loc));
  }
  return r;
}

}  // namespace

Corpus parse_corpus(std::istream& in, Office office, const ParseOptions& options) {
  std::vector<PatentRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(fmt::format("line {}: malformed record: {}", line_no, e.what()),
                            line_no);
    }
    PatentRecord r;
    try {
      r = record_from_json(obj, options);
      validate_record(r);
      if (r.office != office)
        field_error("office", fmt::format("record office {} does not match corpus office {}",
                                          to_string(r.office), to_string(office)));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("line {}: {}", line_no, e.what()), line_no, e.field());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(fmt::format("line {}: {}", line_no, e.what()), line_no);
    }
    if (!ids.insert(r.family_id).second)
      throw ValidationError(fmt::format("line {}: duplicate family_id '{}'", line_no, r.family_id),
                            line_no, "family_id");
    records.push_back(std::move(r));
  }
  if (in.bad()) throw IoError("read failure while parsing corpus");
  return Corpus(office, std::move(records));
}

Corpus parse_corpus_file(const std::string& path, Office office, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open corpus '{}'", path));
  try {
    return parse_corpus(in, office, options);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path, e.what()), e.line().value_or(0), e.field());
  }
}

std::string serialize_record(const PatentRecord& r) {
  ordered_json obj;
  obj["family_id"] = r.family_id;
  obj["office"] = std::string(to_string(r.office));
  obj["filing_year"] = r.filing_year ? ordered_json(*r.filing_year) : ordered_json(nullptr);
  obj["cpc_codes"] = r.cpc_codes;
  obj["cited_family_ids"] = r.cited_family_ids;
  obj["npl_total"] = r.npl_total;
  obj["npl_scientific"] = r.npl_scientific;
  obj["sectors"] = ordered_json::array();
  for (const auto& s : r.sectors) obj["sectors"].push_back(s);
  obj["inventor_locations"] = ordered_json::array();
  for (const auto& loc : r.inventor_locations) {
    ordered_json l;
    l["lat"] = loc.lat;
    l["lon"] = loc.lon;
    l["country"] = loc.country;
    if (loc.region) l["region"] = *loc.region;
    obj["inventor_locations"].push_back(std::move(l));
  }
  return obj.dump();
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus) out << serialize_record(r) << '\n';
}

std::string serialize_corpus(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus(out, corpus);
  return out.str();
}

}  // namespace patentkb
