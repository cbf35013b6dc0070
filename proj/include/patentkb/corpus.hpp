#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patentkb/error.hpp"

namespace patentkb {

enum class Office { EP, US };

std::string_view to_string(Office office);
/// Accepts "EP" / "US" in any case.
Office parse_office(std::string_view text);

inline constexpr std::string_view kUniversitySector = "UNIVERSITY";

struct InventorLocation {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180)
  std::string country;  // ISO alpha-2, uppercase
  std::optional<std::string> region;

  bool operator==(const InventorLocation&) const = default;
};

/// One DOCDB family as seen at one office.
///
/// A family filed at both offices shows up as two records, one per corpus,
/// sharing the family_id. Whether cpc_codes are unioned over the family's
/// applications or taken from one application is decided by the extract
/// producer; nothing here depends on the choice.
struct PatentRecord {
  std::string family_id;
  Office office = Office::EP;
  std::optional<int> filing_year;
  std::vector<std::string> cpc_codes;
  std::vector<std::string> cited_family_ids;  // deduplicated, first-seen order
  std::uint32_t npl_total = 0;
  std::uint32_t npl_scientific = 0;
  std::set<std::string> sectors;
  std::vector<InventorLocation> inventor_locations;

  bool is_university() const { return sectors.contains(std::string(kUniversitySector)); }
  bool operator==(const PatentRecord&) const = default;
};

/// Throws ValidationError naming the offending field.
void validate_record(const PatentRecord& record);

/// Immutable set of records from a single office, in input order, indexed by family_id.
class Corpus {
 public:
  explicit Corpus(Office office) : office_(office) {}
  /// Validates every record, office consistency and family_id uniqueness.
  Corpus(Office office, std::vector<PatentRecord> records);

  Office office() const { return office_; }
  const std::vector<PatentRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const PatentRecord* find(std::string_view family_id) const;
  std::optional<std::size_t> index_of(std::string_view family_id) const;

  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

 private:
  Office office_;
  std::vector<PatentRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Non-owning selection of records; pointees must outlive the set.
using PatentSet = std::vector<const PatentRecord*>;

PatentSet all_patents(const Corpus& corpus);

struct ParseOptions {
  /// Reject unknown keys instead of ignoring them.
  bool strict = false;
};

/// Reads one JSON object per non-empty line. Errors carry the 1-based line number.
Corpus parse_corpus(std::istream& in, Office office, const ParseOptions& options = {});
Corpus parse_corpus_file(const std::string& path, Office office, const ParseOptions& options = {});

/// Canonical single-line rendering, fixed key order. parse(serialize(c)) == c.
std::string serialize_record(const PatentRecord& record);
void write_corpus(std::ostream& out, const Corpus& corpus);
std::string serialize_corpus(const Corpus& corpus);

// ---------------------------------------------------------------------------
// CPC codes and technology definitions

/// Uppercases, trims, and collapses internal whitespace runs to a single space.
std::string normalize_cpc(std::string_view code);

struct TechnologyDef {
  std::string name;
  std::string short_name;
  std::vector<std::string> cpc_prefixes;  // normalized, non-empty
};

/// Normalizes prefixes and checks the definition is usable.
TechnologyDef make_technology(std::string name, std::string short_name,
                              const std::vector<std::string>& cpc_prefixes);

/// True iff any normalized CPC code of the record starts with any prefix.
bool match_technology(const PatentRecord& record, const TechnologyDef& tech);

PatentSet members(const Corpus& corpus, const TechnologyDef& tech);

/// The fourteen Y02 renewable/mitigation technology classes.
std::vector<TechnologyDef> default_technologies();

/// Tab-separated: name, short_name, cpc_prefixes (';'-separated). Optional
/// header line starting with "name". '#' lines are comments.
std::vector<TechnologyDef> load_technologies(std::istream& in);
std::vector<TechnologyDef> load_technologies_file(const std::string& path);
void write_technologies(std::ostream& out, const std::vector<TechnologyDef>& techs);

const TechnologyDef& find_technology(const std::vector<TechnologyDef>& techs,
                                     std::string_view short_name);

// ---------------------------------------------------------------------------
// Jurisdiction sub-selection

using CountrySet = std::set<std::string>;

/// EPO member states (alpha-2).
CountrySet default_europe_set();
/// One alpha-2 code per line; blank lines and '#' comments ignored.
CountrySet load_country_set(std::istream& in);
CountrySet load_country_set_file(const std::string& path);

enum class JurisdictionRule {
  Home,           // EP: >=1 inventor in Europe; US: >=1 inventor in US
  ForeignUsInEp,  // EP records with >=1 US inventor
  ForeignEpInUs,  // US records with >=1 European inventor
};

std::string_view to_string(JurisdictionRule rule);
JurisdictionRule parse_jurisdiction(std::string_view text);

/// Throws ValidationError for a rule that does not apply to the office.
bool jurisdiction_accepts(const PatentRecord& record, Office office, JurisdictionRule rule,
                          const CountrySet& europe);

Corpus jurisdiction_filter(const Corpus& corpus, JurisdictionRule rule, const CountrySet& europe);
PatentSet jurisdiction_filter(const PatentSet& patents, Office office, JurisdictionRule rule,
                              const CountrySet& europe);

}  // namespace patentkb
