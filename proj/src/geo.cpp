#include "patentkb/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "parallel.hpp"
#include "patentkb/error.hpp"
#include "patentkb/indicators.hpp"
#include "patentkb/io.hpp"

namespace patentkb {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct RadPoint {
  double lat;
  double lon;
  double cos_lat;

  explicit RadPoint(const GeoPoint& p)
      : lat(p.lat * kDegToRad), lon(p.lon * kDegToRad), cos_lat(std::cos(lat)) {}
};

// Differences enter through fabs and the cosine product is commutative, so
// swapping the arguments reproduces the same bits.
double haversine_rad(const RadPoint& a, const RadPoint& b) {
  const double s_lat = std::sin(std::fabs(b.lat - a.lat) * 0.5);
  const double s_lon = std::sin(std::fabs(b.lon - a.lon) * 0.5);
  const double h = std::min(1.0, s_lat * s_lat + a.cos_lat * b.cos_lat * s_lon * s_lon);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::vector<RadPoint> located_points(const PatentSet& patents) {
  std::vector<RadPoint> pts;
  pts.reserve(patents.size());
  for (const auto* p : patents)
    if (auto pt = patent_point(*p)) pts.emplace_back(*pt);
  return pts;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t bounded(std::uint64_t r, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) * n) >> 64);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSampleChunk = 1u << 15;

}  // namespace

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  return haversine_rad(RadPoint(a), RadPoint(b));
}

std::optional<GeoPoint> patent_point(const PatentRecord& patent) {
  if (patent.inventor_locations.empty()) return std::nullopt;
  const auto& loc = patent.inventor_locations.front();
  return GeoPoint{loc.lat, loc.lon};
}

std::string_view to_string(IpdMode mode) {
  switch (mode) {
    case IpdMode::Exact: return "exact";
    case IpdMode::Sampled: return "sampled";
    case IpdMode::Auto: return "auto";
  }
  return "?";
}

IpdMode parse_ipd_mode(std::string_view text) {
  if (text == "exact") return IpdMode::Exact;
  if (text == "sampled") return IpdMode::Sampled;
  if (text == "auto") return IpdMode::Auto;
  throw ValidationError(fmt::format("unknown ipd mode '{}' (exact, sampled, auto)", text));
}

std::pair<std::size_t, std::size_t> sample_pair(std::uint64_t seed, std::uint64_t index,
                                                std::size_t n) {
  const std::uint64_t base = seed + kGolden * (2 * index + 1);
  const auto i = bounded(mix64(base), n);
  auto j = bounded(mix64(base + kGolden), n - 1);
  if (j >= i) ++j;
  return {static_cast<std::size_t>(std::min(i, j)), static_cast<std::size_t>(std::max(i, j))};
}

IpdResult inter_patent_distance(const PatentSet& patents, const IpdOptions& options) {
  const auto pts = located_points(patents);
  const std::size_t n = pts.size();
  if (n < 2)
    throw ValidationError(
        fmt::format("inter-patent distance needs at least 2 located patents, got {}", n));

  const std::uint64_t all_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  bool sample = options.mode == IpdMode::Sampled ||
                (options.mode == IpdMode::Auto && all_pairs > kExactPairLimit);

  IpdResult result;
  result.located = n;
  detail::Moments total;

  if (!sample) {
    std::vector<detail::Moments> rows(n - 1);
    detail::parallel_tasks(n - 1, options.threads, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < n; ++j) rows[i].add(haversine_rad(pts[i], pts[j]));
    });
    for (const auto& r : rows) total.merge(r);
    result.pairs = all_pairs;
    result.std_km = std::sqrt(total.m2 / total.count);
  } else {
    if (!options.seed)
      throw ValidationError("sampled inter-patent distance requires a seed");
    if (options.samples < 2) throw ValidationError("sampled inter-patent distance needs >= 2 samples");
    const std::uint64_t m = options.samples;
    const std::uint64_t seed = *options.seed;
    const auto chunks = static_cast<std::size_t>((m + kSampleChunk - 1) / kSampleChunk);
    std::vector<detail::Moments> parts(chunks);
    detail::parallel_tasks(chunks, options.threads, [&](std::size_t c) {
      const std::uint64_t begin = c * kSampleChunk;
      const std::uint64_t end = std::min(m, begin + kSampleChunk);
      for (std::uint64_t k = begin; k < end; ++k) {
        const auto [i, j] = sample_pair(seed, k, n);
        parts[c].add(haversine_rad(pts[i], pts[j]));
      }
    });
    for (const auto& p : parts) total.merge(p);
    result.pairs = m;
    result.sampled = true;
    result.std_km = std::sqrt(total.m2 / (total.count - 1.0));
    result.stderr_km = result.std_km / std::sqrt(static_cast<double>(m));
  }
  result.mean_km = total.mean;
  return result;
}

std::optional<double> reference_distance_patent(const PatentRecord& patent, const Corpus& corpus) {
  const auto origin = patent_point(patent);
  if (!origin) return std::nullopt;
  const RadPoint from(*origin);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& cited : patent.cited_family_ids) {
    const auto* target = corpus.find(cited);
    if (!target) continue;
    const auto to = patent_point(*target);
    if (!to) continue;
    sum += haversine_rad(from, RadPoint(*to));
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

RdResult reference_distance_technology(const PatentSet& patents, const Corpus& corpus) {
  std::vector<std::optional<double>> values;
  values.reserve(patents.size());
  RdResult r;
  for (const auto* p : patents) {
    values.push_back(reference_distance_patent(*p, corpus));
    r.total_citations += p->cited_family_ids.size();
    for (const auto& cited : p->cited_family_ids)
      if (!corpus.find(cited)) ++r.dangling_citations;
  }
  const auto s = summarize(values, "reference distance");
  r.mean_km = s.mean;
  r.std_km = s.std_dev;
  r.defined = s.defined;
  r.undefined = s.undefined;
  return r;
}

void write_mobility_csv(std::ostream& out, const std::vector<MobilityResult>& rows) {
  out << "technology,n_located,ipd_km,ipd_std_km,ipd_stderr_km,ipd_pairs,ipd_mode,rd_population,"
         "rd_km,rd_std_km,rd_defined,rd_dangling_citations,rd_total_citations\n";
  for (const auto& m : rows) {
    out << m.technology << ',';
    if (m.ipd) {
      out << m.ipd->located << ',' << format_number(m.ipd->mean_km) << ','
          << format_number(m.ipd->std_km) << ','
          << (m.ipd->stderr_km ? format_number(*m.ipd->stderr_km) : std::string()) << ','
          << m.ipd->pairs << ',' << (m.ipd->sampled ? "sampled" : "exact");
    } else {
      out << ",,,,0,";
    }
    out << ',' << m.rd_population << ',';
    if (m.rd) {
      out << format_number(m.rd->mean_km) << ',' << format_number(m.rd->std_km) << ','
          << m.rd->defined << ',' << m.rd->dangling_citations << ',' << m.rd->total_citations;
    } else {
      out << ",,0,,";
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

std::size_t GridCounts::located() const {
  std::size_t total = 0;
  for (const auto& [_, c] : cells) total += c;
  return total;
}

GridCounts grid_counts(const PatentSet& patents) {
  GridCounts g;
  for (const auto* p : patents) {
    const auto pt = patent_point(*p);
    if (!pt) {
      ++g.unlocated;
      continue;
    }
    const int lat_key = static_cast<int>(std::floor(2.0 * pt->lat));
    const int lon_key = static_cast<int>(std::floor(2.0 * pt->lon));
    ++g.cells[{lat_key, lon_key}];
  }
  return g;
}

void write_grid_csv(std::ostream& out, const GridCounts& grid) {
  out << "lat_cell,lon_cell,count\n";
  for (const auto& [key, count] : grid.cells)
    out << fmt::format("{:.1f},{:.1f},{}\n", key.first / 2.0, key.second / 2.0, count);
}

namespace {

std::string log_color(std::size_t count, std::size_t max_count) {
  const double t = max_count <= 1 ? 1.0
                                  : std::log(static_cast<double>(count)) /
                                        std::log(static_cast<double>(max_count));
  // pale yellow -> dark red
  constexpr double lo[3] = {255, 237, 160};
  constexpr double hi[3] = {189, 0, 38};
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(lo[k] + t * (hi[k] - lo[k])));
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace

void write_grid_svg(std::ostream& out, const GridCounts& grid, const std::string& title) {
  std::size_t max_count = 0;
  for (const auto& [_, c] : grid.cells) max_count = std::max(max_count, c);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1440\" height=\"760\" "
         "viewBox=\"-180 -95 360 190\">\n";
  if (!title.empty()) out << "<title>" << title << "</title>\n";
  out << "<rect x=\"-180\" y=\"-90\" width=\"360\" height=\"180\" fill=\"#f0f0f0\"/>\n";
  for (const auto& [key, count] : grid.cells) {
    const double lat = key.first / 2.0;
    const double lon = key.second / 2.0;
    out << fmt::format(
        "<rect class=\"cell\" x=\"{:.1f}\" y=\"{:.1f}\" width=\"0.5\" height=\"0.5\" "
        "fill=\"{}\"><title>{:.1f},{:.1f}: {}</title></rect>\n",
        lon, -(lat + 0.5), log_color(count, max_count), lat, lon, count);
  }
  // Legend: log scale from 1 to the maximum count.
  constexpr int kSteps = 10;
  for (int s = 0; s < kSteps; ++s) {
    const double frac = static_cast<double>(s) / (kSteps - 1);
    const auto c = static_cast<std::size_t>(
        std::lround(std::pow(static_cast<double>(std::max<std::size_t>(max_count, 1)), frac)));
    out << fmt::format(
        "<rect class=\"legend\" x=\"{}\" y=\"91\" width=\"6\" height=\"2\" fill=\"{}\"/>\n",
        -180 + 6 * s, log_color(std::max<std::size_t>(c, 1), max_count));
  }
  out << fmt::format(
      "<text x=\"-118\" y=\"93\" font-size=\"2.5\">1 .. {} patents per 0.5 degree cell (log "
      "scale)</text>\n",
      max_count);
  out << "</svg>\n";
}

std::vector<std::pair<std::string, std::size_t>> country_ranking(const PatentSet& patents,
                                                                 std::size_t k) {
  if (k == 0) throw ValidationError("ranking size must be positive");
  std::map<std::string, std::size_t> counts;
  for (const auto* p : patents)
    if (!p->inventor_locations.empty()) ++counts[p->inventor_locations.front().country];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

void write_ranking_csv(std::ostream& out,
                       const std::vector<std::pair<std::string, std::size_t>>& ranking) {
  out << "rank,country,count\n";
  for (std::size_t i = 0; i < ranking.size(); ++i)
    out << i + 1 << ',' << ranking[i].first << ',' << ranking[i].second << '\n';
}

}  // namespace patentkb
