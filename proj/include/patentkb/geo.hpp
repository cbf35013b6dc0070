#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patentkb/corpus.hpp"

namespace patentkb {

/// IUGG mean Earth radius.
inline constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
};

/// Great-circle distance on the sphere of radius kEarthRadiusKm. Symmetric bit for bit.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

/// First listed inventor location, if any.
std::optional<GeoPoint> patent_point(const PatentRecord& patent);

// Inter-patent distance -----------------------------------------------------

enum class IpdMode {
  Exact,    // all unordered pairs
  Sampled,  // m pairs drawn uniformly with replacement
  Auto,     // Exact up to kExactPairLimit pairs, otherwise Sampled
};

inline constexpr std::uint64_t kExactPairLimit = 2'000'000;
inline constexpr std::uint64_t kDefaultIpdSamples = 1'000'000;

std::string_view to_string(IpdMode mode);
IpdMode parse_ipd_mode(std::string_view text);

struct IpdOptions {
  IpdMode mode = IpdMode::Auto;
  std::uint64_t samples = kDefaultIpdSamples;
  /// Required whenever sampling happens.
  std::optional<std::uint64_t> seed;
  /// Worker threads; results do not depend on this.
  unsigned threads = 1;
};

struct IpdResult {
  double mean_km = 0.0;
  /// Spread of the pair distances: population std over all pairs (exact) or
  /// sample std of the drawn pairs (sampled).
  double std_km = 0.0;
  /// Standard error of the mean; present only when sampled.
  std::optional<double> stderr_km;
  std::size_t located = 0;
  std::uint64_t pairs = 0;  // pairs evaluated
  bool sampled = false;
};

/// Mean distance between located patents. Throws ValidationError with fewer
/// than two located patents, or when sampling without a seed.
IpdResult inter_patent_distance(const PatentSet& patents, const IpdOptions& options = {});

/// The unordered pair (i, j), i < j, drawn for sample `index` among n points.
/// Counter-based: depends only on (seed, index, n).
std::pair<std::size_t, std::size_t> sample_pair(std::uint64_t seed, std::uint64_t index,
                                                std::size_t n);

// Reference distance --------------------------------------------------------

/// Mean distance from the patent to its located in-corpus citations.
/// nullopt when the patent is unlocated or no cited in-corpus patent is located.
std::optional<double> reference_distance_patent(const PatentRecord& patent, const Corpus& corpus);

struct RdResult {
  double mean_km = 0.0;
  double std_km = 0.0;  // sample std over patents
  std::size_t defined = 0;
  std::size_t undefined = 0;
  /// Patent citations of the considered patents whose target is outside the corpus.
  std::size_t dangling_citations = 0;
  std::size_t total_citations = 0;
};

/// Unweighted mean of the defined patent-level values. Throws ValidationError
/// when no patent has a defined reference distance.
RdResult reference_distance_technology(const PatentSet& patents, const Corpus& corpus);

struct MobilityResult {
  std::string technology;
  /// Absent when fewer than two members are located.
  std::optional<IpdResult> ipd;
  /// Absent when no patent in the (jurisdiction-filtered) set has a defined rd.
  std::optional<RdResult> rd;
  std::size_t rd_population = 0;  // patents left after the jurisdiction filter
};

void write_mobility_csv(std::ostream& out, const std::vector<MobilityResult>& rows);

// Grid and rankings -----------------------------------------------------------

/// Patent counts on the 0.5 degree grid, keyed by (2*lat_cell, 2*lon_cell) so
/// the key is an exact integer; the cell's south-west corner is key / 2.
struct GridCounts {
  static constexpr double kResolution = 0.5;
  std::map<std::pair<int, int>, std::size_t> cells;
  std::size_t unlocated = 0;

  std::size_t located() const;
};

GridCounts grid_counts(const PatentSet& patents);

/// lat_cell,lon_cell,count
void write_grid_csv(std::ostream& out, const GridCounts& grid);
/// Equirectangular world heat map, logarithmic colour scale.
void write_grid_svg(std::ostream& out, const GridCounts& grid, const std::string& title = {});

/// Top-k countries of the patents' first inventors; ties by country code.
std::vector<std::pair<std::string, std::size_t>> country_ranking(const PatentSet& patents,
                                                                 std::size_t k);

/// rank,country,count
void write_ranking_csv(std::ostream& out,
                       const std::vector<std::pair<std::string, std::size_t>>& ranking);

}  // namespace patentkb
