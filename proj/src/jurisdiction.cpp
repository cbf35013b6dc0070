#include <cctype>
#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "patentkb/corpus.hpp"
#include "patentkb/error.hpp"

namespace patentkb {

CountrySet default_europe_set() {
  // EPO member states.
  return {"AL", "AT", "BE", "BG", "CH", "CY", "CZ", "DE", "DK", "EE", "ES", "FI", "FR",
          "GB", "GR", "HR", "HU", "IE", "IS", "IT", "LI", "LT", "LU", "LV", "MC", "ME",
          "MK", "MT", "NL", "NO", "PL", "PT", "RO", "RS", "SE", "SI", "SK", "SM", "TR"};
}

CountrySet load_country_set(std::istream& in) {
  CountrySet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    auto code = line.substr(b, e - b + 1);
    if (code.size() != 2 || !std::isupper(static_cast<unsigned char>(code[0])) ||
        !std::isupper(static_cast<unsigned char>(code[1])))
      throw ValidationError(
          fmt::format("line {}: '{}' is not an uppercase alpha-2 country code", line_no, code),
          line_no);
    out.insert(code);
  }
  return out;
}

CountrySet load_country_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open country set '{}'", path));
  try {
    return load_country_set(in);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path, e.what()), e.line().value_or(0));
  }
}

std::string_view to_string(JurisdictionRule rule) {
  switch (rule) {
    case JurisdictionRule::Home: return "home";
    case JurisdictionRule::ForeignUsInEp: return "foreign-us-in-ep";
    case JurisdictionRule::ForeignEpInUs: return "foreign-ep-in-us";
  }
  return "?";
}

JurisdictionRule parse_jurisdiction(std::string_view text) {
  if (text == "home" || text == "HOME") return JurisdictionRule::Home;
  if (text == "foreign-us-in-ep" || text == "FOREIGN_US_IN_EP")
    return JurisdictionRule::ForeignUsInEp;
  if (text == "foreign-ep-in-us" || text == "FOREIGN_EP_IN_US")
    return JurisdictionRule::ForeignEpInUs;
  throw ValidationError(fmt::format("unknown jurisdiction rule '{}'", text));
}

namespace {

bool any_inventor_in(const PatentRecord& r, const CountrySet& countries) {
  for (const auto& loc : r.inventor_locations)
    if (countries.contains(loc.country)) return true;
  return false;
}

bool any_inventor_from(const PatentRecord& r, std::string_view country) {
  for (const auto& loc : r.inventor_locations)
    if (loc.country == country) return true;
  return false;
}

void check_rule(Office office, JurisdictionRule rule) {
  if ((rule == JurisdictionRule::ForeignUsInEp && office != Office::EP) ||
      (rule == JurisdictionRule::ForeignEpInUs && office != Office::US))
    throw ValidationError(fmt::format("jurisdiction rule {} does not apply to {} corpora",
                                      to_string(rule), to_string(office)));
}

}  // namespace

bool jurisdiction_accepts(const PatentRecord& record, Office office, JurisdictionRule rule,
                          const CountrySet& europe) {
  check_rule(office, rule);
  switch (rule) {
    case JurisdictionRule::Home:
      return office == Office::EP ? any_inventor_in(record, europe)
                                  : any_inventor_from(record, "US");
    case JurisdictionRule::ForeignUsInEp: return any_inventor_from(record, "US");
    case JurisdictionRule::ForeignEpInUs: return any_inventor_in(record, europe);
  }
  return false;
}

Corpus jurisdiction_filter(const Corpus& corpus, JurisdictionRule rule, const CountrySet& europe) {
  check_rule(corpus.office(), rule);
  std::vector<PatentRecord> kept;
  for (const auto& r : corpus)
    if (jurisdiction_accepts(r, corpus.office(), rule, europe)) kept.push_back(r);
  return Corpus(corpus.office(), std::move(kept));
}

PatentSet jurisdiction_filter(const PatentSet& patents, Office office, JurisdictionRule rule,
                              const CountrySet& europe) {
  check_rule(office, rule);
  PatentSet out;
  for (const auto* p : patents)
    if (jurisdiction_accepts(*p, office, rule, europe)) out.push_back(p);
  return out;
}

}  // namespace patentkb
