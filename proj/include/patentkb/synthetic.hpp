#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "patentkb/corpus.hpp"

namespace patentkb {

struct TechnologyShare {
  std::string short_name;
  double weight = 1.0;
};

/// Inventors are drawn around a centre with Gaussian spread (degrees).
struct LocationCluster {
  double lat = 0.0;
  double lon = 0.0;
  double spread_deg = 1.0;
  std::string country;
  std::optional<std::string> region;
  double weight = 1.0;
};

/// A handful of inventor hubs in Europe, the US and East Asia.
std::vector<LocationCluster> default_clusters();

/// Parameters of the seeded test-corpus generator.
///
/// Planted quantities (university flags, unlocated records, cluster membership
/// of the first inventor) are apportioned exactly from their rates/weights, so
/// tests can check indicator values against the configuration itself.
struct GeneratorConfig {
  Office office = Office::EP;
  std::size_t count = 100;
  std::string id_prefix = "F";

  std::vector<TechnologyDef> technologies = default_technologies();
  /// Empty means an equal share of every technology.
  std::vector<TechnologyShare> technology_mix;
  /// Share of records carrying only non-Y02 codes.
  double background_rate = 0.1;
  /// Probability of an additional non-Y02 code on a technology record.
  double extra_code_rate = 0.3;

  /// Mean (Poisson) number of in-corpus citations, always to earlier records.
  double citations_per_record = 3.0;
  /// Probability a citation target is drawn from the same technology.
  double internal_bias = 0.5;
  /// Mean (Poisson) number of citations to families outside the corpus.
  double dangling_per_record = 0.5;

  double npl_per_record = 1.5;
  double npl_scientific_rate = 0.4;
  double university_rate = 0.1;

  std::vector<LocationCluster> clusters = default_clusters();
  double unlocated_rate = 0.05;
  /// Probability of a second inventor drawn from a random cluster.
  double second_inventor_rate = 0.2;

  int year_min = 1990;
  int year_max = 2019;
  double missing_year_rate = 0.02;
};


/// Fills unset fields from the defaults; throws ValidationError on bad keys or values.
GeneratorConfig generator_config_from_json(const std::string& json_text);
std::string generator_config_to_json(const GeneratorConfig& config);

/// Deterministic for fixed (config, seed). Throws ValidationError for infeasible configs.
Corpus generate_synthetic(const GeneratorConfig& config, std::uint64_t seed);

}  // namespace patentkb
