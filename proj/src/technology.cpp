#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "patentkb/corpus.hpp"
#include "patentkb/error.hpp"

namespace patentkb {

std::string normalize_cpc(std::string_view code) {
  std::string out;
  out.reserve(code.size());
  bool pending_space = false;
  for (unsigned char c : code) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::toupper(c)));
  }
  return out;
}

TechnologyDef make_technology(std::string name, std::string short_name,
                              const std::vector<std::string>& cpc_prefixes) {
  TechnologyDef tech{std::move(name), std::move(short_name), {}};
  if (tech.short_name.empty()) throw ValidationError("technology short_name is empty");
  for (const auto& p : cpc_prefixes) {
    auto norm = normalize_cpc(p);
    if (norm.empty()) continue;
    if (std::find(tech.cpc_prefixes.begin(), tech.cpc_prefixes.end(), norm) ==
        tech.cpc_prefixes.end())
      tech.cpc_prefixes.push_back(std::move(norm));
  }
  if (tech.cpc_prefixes.empty())
    throw ValidationError(
        fmt::format("technology '{}' has no CPC prefixes after normalization", tech.short_name));
  return tech;
}

bool match_technology(const PatentRecord& record, const TechnologyDef& tech) {
  for (const auto& code : record.cpc_codes) {
    const auto norm = normalize_cpc(code);
    for (const auto& prefix : tech.cpc_prefixes)
      if (norm.starts_with(prefix)) return true;
  }
  return false;
}

PatentSet members(const Corpus& corpus, const TechnologyDef& tech) {
  PatentSet out;
  for (const auto& r : corpus)
    if (match_technology(r, tech)) out.push_back(&r);
  return out;
}

std::vector<TechnologyDef> default_technologies() {
  return {
      make_technology("Geothermal energy", "geothermal", {"Y02E 10/1"}),
      make_technology("Hydro energy", "hydro", {"Y02E 10/2"}),
      make_technology("Energy from the sea", "sea", {"Y02E 10/3"}),
      make_technology("Solar thermal energy", "solar_thermal", {"Y02E 10/4"}),
      make_technology("Photovoltaic energy", "photovoltaics", {"Y02E 10/5"}),
      make_technology("Wind energy", "wind", {"Y02E 10/7"}),
      make_technology("Combustion technologies with mitigation potential", "clean_combustion",
                      {"Y02E 20"}),
      make_technology("Nuclear fission reactors", "nuclear", {"Y02E 30/3"}),
      make_technology("Efficient electrical power generation, transmission or distribution",
                      "electric_grids", {"Y02E 40"}),
      make_technology("Production of fuel of non-fossil origin", "non_fossil_fuels", {"Y02E 50"}),
      make_technology("Energy storage", "energy_storage", {"Y02E 60/1"}),
      make_technology("Hydrogen technology", "hydrogen", {"Y02E 60/3"}),
      make_technology("Fuel cells", "fuel_cells", {"Y02E 60/5"}),
      make_technology("Carbon capture and storage", "ccs", {"Y02C"}),
  };
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<TechnologyDef> load_technologies(std::istream& in) {
  std::vector<TechnologyDef> techs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cols = split(line, '\t');
    if (line_no == 1 && trim(cols.front()) == "name") continue;
    if (cols.size() != 3)
      throw ValidationError(
          fmt::format("line {}: expected 3 tab-separated columns, got {}", line_no, cols.size()),
          line_no);
    try {
      techs.push_back(make_technology(trim(cols[0]), trim(cols[1]), split(cols[2], ';')));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("line {}: {}", line_no, e.what()), line_no);
    }
    for (std::size_t i = 0; i + 1 < techs.size(); ++i)
      if (techs[i].short_name == techs.back().short_name || techs[i].name == techs.back().name)
        throw ValidationError(
            fmt::format("line {}: duplicate technology '{}'", line_no, techs.back().short_name),
            line_no);
  }
  return techs;
}

std::vector<TechnologyDef> load_technologies_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open technology definitions '{}'", path));
  try {
    return load_technologies(in);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path, e.what()), e.line().value_or(0));
  }
}

void write_technologies(std::ostream& out, const std::vector<TechnologyDef>& techs) {
  out << "name\tshort_name\tcpc_prefixes\n";
  for (const auto& t : techs) {
    out << t.name << '\t' << t.short_name << '\t';
    for (std::size_t i = 0; i < t.cpc_prefixes.size(); ++i)
      out << (i ? ";" : "") << t.cpc_prefixes[i];
    out << '\n';
  }
}

const TechnologyDef& find_technology(const std::vector<TechnologyDef>& techs,
                                     std::string_view short_name) {
  for (const auto& t : techs)
    if (t.short_name == short_name) return t;
  throw ValidationError(fmt::format("unknown technology '{}'", short_name));
}

}  // namespace patentkb
