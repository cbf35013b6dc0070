#include "patentkb/citegraph.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "patentkb/error.hpp"

namespace patentkb {

CitationGraph build_graph(const Corpus& corpus) {
  CitationGraph g;
  const auto& records = corpus.records();
  g.out_.resize(records.size());
  g.dangling_.resize(records.size(), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::unordered_set<std::size_t> seen;
    for (const auto& cited : records[i].cited_family_ids) {
      auto j = corpus.index_of(cited);
      if (!j) {
        ++g.dangling_[i];
        continue;
      }
      if (*j == i || !seen.insert(*j).second) continue;
      g.out_[i].push_back(*j);
    }
    g.edge_count_ += g.out_[i].size();
    g.dangling_count_ += g.dangling_[i];
  }
  return g;
}

std::vector<std::pair<std::size_t, std::size_t>> CitationGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < out_.size(); ++i)
    for (auto j : out_[i]) out.emplace_back(i, j);
  return out;
}

void write_edge_list(std::ostream& out, const CitationGraph& graph, const Corpus& corpus) {
  out << "citing_family_id,cited_family_id\n";
  const auto& records = corpus.records();
  for (const auto& [from, to] : graph.edges())
    out << records[from].family_id << ',' << records[to].family_id << '\n';
}

std::string cpc_group(std::string_view code) {
  auto norm = normalize_cpc(code);
  const auto slash = norm.find('/');
  if (slash == std::string::npos) return norm;
  std::size_t end = slash + 1;
  if (end < norm.size() && std::isdigit(static_cast<unsigned char>(norm[end]))) ++end;
  return norm.substr(0, end);
}

namespace {

std::size_t node_of(const PatentRecord& patent, const Corpus& corpus) {
  auto idx = corpus.index_of(patent.family_id);
  if (!idx) throw ValidationError(fmt::format("patent '{}' is not in the corpus", patent.family_id));
  return *idx;
}

std::vector<std::string> groups_of(const PatentRecord& r) {
  std::vector<std::string> out;
  for (const auto& code : r.cpc_codes) {
    auto g = cpc_group(code);
    if (!g.empty() && std::find(out.begin(), out.end(), g) == out.end()) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

std::size_t internal_reference_count(const PatentRecord& patent, const CitationGraph& graph,
                                     const ReferenceScope& scope, const Corpus& corpus) {
  const auto node = node_of(patent, corpus);
  const auto& records = corpus.records();
  const auto& targets = graph.cited(node);
  if (targets.empty()) return 0;

  if (scope.kind() == ReferenceScope::Kind::Technology) {
    return static_cast<std::size_t>(std::count_if(targets.begin(), targets.end(), [&](std::size_t j) {
      return match_technology(records[j], scope.tech());
    }));
  }

  const auto own = groups_of(patent);
  std::size_t count = 0;
  for (auto j : targets) {
    const auto theirs = groups_of(records[j]);
    const bool shared = std::any_of(theirs.begin(), theirs.end(), [&](const std::string& g) {
      return std::find(own.begin(), own.end(), g) != own.end();
    });
    if (shared) ++count;
  }
  return count;
}

std::size_t in_corpus_citation_count(const PatentRecord& patent, const CitationGraph& graph,
                                     const Corpus& corpus) {
  return graph.cited(node_of(patent, corpus)).size();
}

}  // namespace patentkb
