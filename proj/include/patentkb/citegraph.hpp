#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "patentkb/corpus.hpp"
#include "patentkb/error.hpp"

namespace patentkb {

/// Directed family-to-family citations inside one corpus.
///
/// Node i is corpus.records()[i]. Only citations whose target is present in
/// the corpus become edges; the rest are counted as dangling. The graph only
/// references indices, so it stays valid as long as the corpus it was built
/// from is not replaced.
class CitationGraph {
 public:
  CitationGraph() = default;

  std::size_t node_count() const { return out_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t dangling_count() const { return dangling_count_; }

  /// In-corpus citation targets of node i, in the record's citation order.
  const std::vector<std::size_t>& cited(std::size_t i) const { return out_[i]; }
  std::size_t dangling_of(std::size_t i) const { return dangling_[i]; }

  /// (citing, cited) node pairs, ordered by citing node then citation order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  friend CitationGraph build_graph(const Corpus& corpus);

 private:
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> dangling_;
  std::size_t edge_count_ = 0;
  std::size_t dangling_count_ = 0;
};

CitationGraph build_graph(const Corpus& corpus);

/// CSV with header citing_family_id,cited_family_id.
void write_edge_list(std::ostream& out, const CitationGraph& graph, const Corpus& corpus);

/// Group-level truncation of a CPC symbol: the normalized text up to and
/// including '/' plus the first main-group digit after it ("Y02E 10/541" ->
/// "Y02E 10/5"). Symbols without '/' are returned normalized and whole.
std::string cpc_group(std::string_view code);

/// Which cited patents count as internal references.
class ReferenceScope {
 public:
  enum class Kind { Technology, CpcGroup };

  static ReferenceScope technology(TechnologyDef tech) {
    if (tech.cpc_prefixes.empty())
      throw ValidationError("technology scope requires at least one CPC prefix");
    return ReferenceScope(std::move(tech));
  }
  static ReferenceScope cpc_group() { return ReferenceScope(); }

  Kind kind() const { return kind_; }
  /// Only meaningful for Kind::Technology.
  const TechnologyDef& tech() const { return tech_; }

 private:
  ReferenceScope() : kind_(Kind::CpcGroup) {}
  explicit ReferenceScope(TechnologyDef tech) : kind_(Kind::Technology), tech_(std::move(tech)) {}

  Kind kind_;
  TechnologyDef tech_;
};

/// Number of in-corpus cited patents that are internal under `scope`.
/// Throws ValidationError when the patent is not part of the corpus.
std::size_t internal_reference_count(const PatentRecord& patent, const CitationGraph& graph,
                                     const ReferenceScope& scope, const Corpus& corpus);

/// Number of in-corpus cited patents (the idf denominator).
std::size_t in_corpus_citation_count(const PatentRecord& patent, const CitationGraph& graph,
                                     const Corpus& corpus);

}  // namespace patentkb
