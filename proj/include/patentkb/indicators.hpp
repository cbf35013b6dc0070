#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patentkb/citegraph.hpp"
#include "patentkb/corpus.hpp"

namespace patentkb {

/// Mean over the patents where a quantity is defined.
///
/// std_dev is the sample standard deviation (n - 1 denominator), 0 for a
/// single defined value. `undefined` counts the patents that were skipped.
struct Summary {
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t defined = 0;
  std::size_t undefined = 0;
};

/// Summary of the defined entries; throws ValidationError if none are defined.
Summary summarize(std::span<const std::optional<double>> values, const char* what);
Summary summarize(std::span<const double> values, const char* what);

// Analyticity -------------------------------------------------------------

/// Mean scientific NPL references per patent, zero-reference patents included.
Summary science_dependence(const PatentSet& patents);

/// npl_scientific / (patent references + npl_total); nullopt when the patent
/// cites nothing at all. Out-of-corpus patent references count.
std::optional<double> sdf_patent(const PatentRecord& patent);
Summary sdf_technology(const PatentSet& patents);

double university_fraction(const PatentSet& patents);

// Cumulativeness ----------------------------------------------------------

Summary internal_dependence(const PatentSet& patents, const CitationGraph& graph,
                            const ReferenceScope& scope, const Corpus& corpus);

/// Internal references over in-corpus patent references; nullopt when the
/// patent cites no in-corpus patent.
std::optional<double> idf_patent(const PatentRecord& patent, const CitationGraph& graph,
                                 const ReferenceScope& scope, const Corpus& corpus);
Summary idf_technology(const PatentSet& patents, const CitationGraph& graph,
                       const ReferenceScope& scope, const Corpus& corpus);

/// internal_dependence / |patents| (references per patent squared).
double relative_internal_dependence(const PatentSet& patents, const CitationGraph& graph,
                                    const ReferenceScope& scope, const Corpus& corpus);
double relative_internal_dependence(double id, std::size_t n_patents);

// Per-technology table ----------------------------------------------------

struct IndicatorRow {
  std::string technology;  // short_name
  std::size_t n_patents = 0;
  Summary sd;
  std::optional<Summary> sdf;  // absent when no member has a defined sdf
  double uf = 0.0;
  Summary id;
  std::optional<Summary> idf;
  double rid = 0.0;  // id.mean / n_patents
};

struct IndicatorTable {
  std::vector<IndicatorRow> rows;
};

/// Analyticity and cumulativeness of one technology; internal references use
/// the technology itself as scope. Throws ValidationError when no patent matches.
IndicatorRow compute_indicator_row(const TechnologyDef& tech, const Corpus& corpus,
                                   const CitationGraph& graph);

/// Header followed by one row per technology, 6 significant digits. Absent
/// values are written as empty cells.
void write_indicator_csv(std::ostream& out, const IndicatorTable& table);

}  // namespace patentkb
