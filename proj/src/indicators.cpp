#include "patentkb/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "patentkb/error.hpp"
#include "patentkb/io.hpp"

namespace patentkb {

namespace {

void require_nonempty(const PatentSet& patents, const char* what) {
  if (patents.empty()) throw ValidationError(fmt::format("{}: empty patent set", what));
}

}  // namespace

Summary summarize(std::span<const std::optional<double>> values, const char* what) {
  Summary s;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) {
      ++s.undefined;
      continue;
    }
    sum += *v;
    ++s.defined;
  }
  if (s.defined == 0) throw ValidationError(fmt::format("{}: undefined for every patent", what));
  s.mean = sum / static_cast<double>(s.defined);
  if (s.defined > 1) {
    double ss = 0.0;
    for (const auto& v : values)
      if (v) ss += (*v - s.mean) * (*v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.defined - 1));
  }
  return s;
}

Summary summarize(std::span<const double> values, const char* what) {
  std::vector<std::optional<double>> wrapped(values.begin(), values.end());
  return summarize(wrapped, what);
}

Summary science_dependence(const PatentSet& patents) {
  require_nonempty(patents, "science dependence");
  std::vector<double> v;
  v.reserve(patents.size());
  for (const auto* p : patents) v.push_back(static_cast<double>(p->npl_scientific));
  return summarize(v, "science dependence");
}

std::optional<double> sdf_patent(const PatentRecord& patent) {
  const auto total = patent.cited_family_ids.size() + patent.npl_total;
  if (total == 0) return std::nullopt;
  return static_cast<double>(patent.npl_scientific) / static_cast<double>(total);
}

Summary sdf_technology(const PatentSet& patents) {
  require_nonempty(patents, "science dependence fraction");
  std::vector<std::optional<double>> v;
  v.reserve(patents.size());
  for (const auto* p : patents) v.push_back(sdf_patent(*p));
  return summarize(v, "science dependence fraction");
}

double university_fraction(const PatentSet& patents) {
  require_nonempty(patents, "university fraction");
  std::size_t flagged = 0;
  for (const auto* p : patents) flagged += p->is_university() ? 1 : 0;
  return static_cast<double>(flagged) / static_cast<double>(patents.size());
}

Summary internal_dependence(const PatentSet& patents, const CitationGraph& graph,
                            const ReferenceScope& scope, const Corpus& corpus) {
  require_nonempty(patents, "internal dependence");
  std::vector<double> v;
  v.reserve(patents.size());
  for (const auto* p : patents)
    v.push_back(static_cast<double>(internal_reference_count(*p, graph, scope, corpus)));
  return summarize(v, "internal dependence");
}

std::optional<double> idf_patent(const PatentRecord& patent, const CitationGraph& graph,
                                 const ReferenceScope& scope, const Corpus& corpus) {
  const auto denom = in_corpus_citation_count(patent, graph, corpus);
  if (denom == 0) return std::nullopt;
  return static_cast<double>(internal_reference_count(patent, graph, scope, corpus)) /
         static_cast<double>(denom);
}

Summary idf_technology(const PatentSet& patents, const CitationGraph& graph,
                       const ReferenceScope& scope, const Corpus& corpus) {
  require_nonempty(patents, "internal dependence fraction");
  std::vector<std::optional<double>> v;
  v.reserve(patents.size());
  for (const auto* p : patents) v.push_back(idf_patent(*p, graph, scope, corpus));
  return summarize(v, "internal dependence fraction");
}

double relative_internal_dependence(const PatentSet& patents, const CitationGraph& graph,
                                    const ReferenceScope& scope, const Corpus& corpus) {
  const auto id = internal_dependence(patents, graph, scope, corpus);
  return relative_internal_dependence(id.mean, patents.size());
}

double relative_internal_dependence(double id, std::size_t n_patents) {
  if (n_patents == 0) throw ValidationError("relative internal dependence of an empty technology");
  return id / static_cast<double>(n_patents);
}

IndicatorRow compute_indicator_row(const TechnologyDef& tech, const Corpus& corpus,
                                   const CitationGraph& graph) {
  const auto patents = members(corpus, tech);
  if (patents.empty())
    throw ValidationError(fmt::format("technology '{}' has no patents in the {} corpus",
                                      tech.short_name, to_string(corpus.office())));
  const auto scope = ReferenceScope::technology(tech);

  IndicatorRow row;
  row.technology = tech.short_name;
  row.n_patents = patents.size();
  row.sd = science_dependence(patents);
  if (std::any_of(patents.begin(), patents.end(), [](const auto* p) { return sdf_patent(*p).has_value(); }))
    row.sdf = sdf_technology(patents);
  row.uf = university_fraction(patents);
  row.id = internal_dependence(patents, graph, scope, corpus);
  if (std::any_of(patents.begin(), patents.end(),
                  [&](const auto* p) { return in_corpus_citation_count(*p, graph, corpus) > 0; }))
    row.idf = idf_technology(patents, graph, scope, corpus);
  row.rid = relative_internal_dependence(row.id.mean, row.n_patents);
  return row;
}

namespace {

std::string cell(const std::optional<Summary>& s, double Summary::*field) {
  return s ? format_number((*s).*field) : std::string();
}

std::string count_cell(const std::optional<Summary>& s) {
  return std::to_string(s ? s->defined : 0);
}

}  // namespace

void write_indicator_csv(std::ostream& out, const IndicatorTable& table) {
  out << "technology,n_patents,sd,sd_std,sdf,sdf_std,sdf_defined,uf,id,id_std,idf,idf_std,"
         "idf_defined,rid\n";
  for (const auto& r : table.rows) {
    out << r.technology << ',' << r.n_patents << ',' << format_number(r.sd.mean) << ','
        << format_number(r.sd.std_dev) << ',' << cell(r.sdf, &Summary::mean) << ','
        << cell(r.sdf, &Summary::std_dev) << ',' << count_cell(r.sdf) << ','
        << format_number(r.uf) << ',' << format_number(r.id.mean) << ','
        << format_number(r.id.std_dev) << ',' << cell(r.idf, &Summary::mean) << ','
        << cell(r.idf, &Summary::std_dev) << ',' << count_cell(r.idf) << ','
        << format_number(r.rid) << '\n';
  }
}

}  // namespace patentkb
