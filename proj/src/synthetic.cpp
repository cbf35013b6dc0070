#include "patentkb/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/discrete_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "patentkb/error.hpp"

namespace patentkb {

std::vector<LocationCluster> default_clusters() {
  return {
      {48.78, 9.18, 0.8, "DE", std::string("Baden-Wurttemberg"), 4.0},
      {48.14, 11.58, 0.8, "DE", std::string("Bayern"), 3.0},
      {48.86, 2.35, 1.0, "FR", std::string("Ile-de-France"), 2.0},
      {56.16, 10.20, 0.7, "DK", std::nullopt, 1.5},
      {51.51, -0.13, 0.8, "GB", std::string("England"), 1.0},
      {47.37, 8.54, 0.4, "CH", std::nullopt, 0.8},
      {37.40, -122.10, 1.2, "US", std::string("California"), 3.5},
      {40.71, -74.00, 1.2, "US", std::string("New York"), 2.0},
      {35.68, 139.69, 0.8, "JP", std::string("Tokyo"), 3.0},
      {37.57, 126.98, 0.6, "KR", std::nullopt, 1.2},
  };
}

namespace {

using Engine = boost::random::mt19937_64;

void check_rate(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ValidationError(fmt::format("generator config: {} must lie in [0, 1], got {}", name, v));
}

void check_mean(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw ValidationError(fmt::format("generator config: {} must be finite and >= 0", name));
}

void validate_config(const GeneratorConfig& c) {
  check_rate(c.background_rate, "background_rate");
  check_rate(c.extra_code_rate, "extra_code_rate");
  check_rate(c.internal_bias, "internal_bias");
  check_rate(c.npl_scientific_rate, "npl_scientific_rate");
  check_rate(c.university_rate, "university_rate");
  check_rate(c.unlocated_rate, "unlocated_rate");
  check_rate(c.second_inventor_rate, "second_inventor_rate");
  check_rate(c.missing_year_rate, "missing_year_rate");
  check_mean(c.citations_per_record, "citations_per_record");
  check_mean(c.dangling_per_record, "dangling_per_record");
  check_mean(c.npl_per_record, "npl_per_record");
  if (c.year_min > c.year_max) throw ValidationError("generator config: year_min > year_max");
  if (c.id_prefix.starts_with("EXT-"))
    throw ValidationError("generator config: id_prefix 'EXT-' is reserved for dangling citations");
  if (c.count == 0) return;

  // Each record can only cite distinct, earlier records.
  if (c.citations_per_record > static_cast<double>(c.count - 1))
    throw ValidationError(fmt::format(
        "generator config: citations_per_record {} cannot be met by {} records without "
        "self-citation",
        c.citations_per_record, c.count));
  if (c.background_rate < 1.0 && c.technologies.empty())
    throw ValidationError("generator config: technology records requested but no technologies");
  for (const auto& share : c.technology_mix) {
    find_technology(c.technologies, share.short_name);
    if (!(share.weight >= 0.0)) throw ValidationError("generator config: negative technology weight");
  }
  if (!c.technology_mix.empty() && c.background_rate < 1.0 &&
      std::none_of(c.technology_mix.begin(), c.technology_mix.end(),
                   [](const auto& s) { return s.weight > 0.0; }))
    throw ValidationError("generator config: technology_mix has no positive weight");
  if (c.unlocated_rate < 1.0) {
    double total = 0.0;
    for (const auto& cl : c.clusters) {
      if (!(cl.weight >= 0.0) || !(cl.spread_deg >= 0.0))
        throw ValidationError("generator config: cluster weight and spread must be >= 0");
      if (!(cl.lat >= -90.0 && cl.lat <= 90.0 && cl.lon >= -180.0 && cl.lon < 180.0))
        throw ValidationError("generator config: cluster centre out of coordinate bounds");
      if (cl.country.size() != 2 || !std::isupper(static_cast<unsigned char>(cl.country[0])) ||
          !std::isupper(static_cast<unsigned char>(cl.country[1])))
        throw ValidationError(
            fmt::format("generator config: bad cluster country '{}'", cl.country));
      total += cl.weight;
    }
    if (!(total > 0.0))
      throw ValidationError("generator config: located records requested but no cluster weight");
  }
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(v[i - 1], v[pick(rng)]);
  }
}

/// Largest-remainder apportionment of `total` items over `weights`.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size(), 0);
  if (total == 0 || sum <= 0.0) return out;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[remainders[k % weights.size()].second];
  return out;
}

/// Flags exactly round(rate * n) of n slots.
std::vector<bool> plant(std::size_t n, double rate, Engine& rng) {
  const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  std::vector<bool> flags(n, false);
  std::fill(flags.begin(), flags.begin() + static_cast<std::ptrdiff_t>(std::min(k, n)), true);
  shuffle(flags, rng);
  return flags;
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

InventorLocation draw_location(const LocationCluster& cl, Engine& rng) {
  boost::random::normal_distribution<double> noise(0.0, 1.0);
  double lat = cl.lat + cl.spread_deg * noise(rng);
  double lon = cl.lon + cl.spread_deg * noise(rng);
  lat = std::clamp(round6(lat), -90.0, 90.0);
  lon = round6(lon);
  while (lon >= 180.0) lon -= 360.0;
  while (lon < -180.0) lon += 360.0;
  return {lat, lon, cl.country, cl.region};
}

std::string extend_code(const std::string& prefix, Engine& rng) {
  boost::random::uniform_int_distribution<int> digit(0, 9);
  boost::random::uniform_int_distribution<int> len(0, 2);
  std::string code = prefix;
  if (prefix.find('/') != std::string::npos) {
    for (int i = len(rng); i > 0; --i) code.push_back(static_cast<char>('0' + digit(rng)));
  } else if (prefix.find(' ') != std::string::npos) {
    code += fmt::format("/{}{}", 1 + digit(rng) % 9, digit(rng));
  } else {
    code += fmt::format(" {}0/{}", 1 + digit(rng) % 2, 1 + digit(rng) % 9);
  }
  return code;
}

constexpr const char* kBackgroundCodes[] = {"H01L 31/04", "F03D 1/06", "B01D 53/14",
                                            "H02J 3/38",  "C12P 7/06", "G21C 7/00",
                                            "F24S 20/20", "A61K 9/00", "G06F 17/30"};

}  // namespace

Corpus generate_synthetic(const GeneratorConfig& config, std::uint64_t seed) {
  validate_config(config);
  const std::size_t n = config.count;
  if (n == 0) return Corpus(config.office);

  Engine rng(seed);

  // Technology weights, indexed like config.technologies.
  std::vector<double> tech_weights(config.technologies.size(), config.technology_mix.empty() ? 1.0 : 0.0);
  for (const auto& share : config.technology_mix)
    for (std::size_t t = 0; t < config.technologies.size(); ++t)
      if (config.technologies[t].short_name == share.short_name) tech_weights[t] += share.weight;

  const auto university = plant(n, config.university_rate, rng);
  const auto unlocated = plant(n, config.unlocated_rate, rng);
  const auto located_count = static_cast<std::size_t>(std::count(unlocated.begin(), unlocated.end(), false));

  std::vector<std::size_t> cluster_of;
  if (located_count > 0) {
    std::vector<double> w;
    for (const auto& cl : config.clusters) w.push_back(cl.weight);
    const auto quota = apportion(located_count, w);
    for (std::size_t c = 0; c < quota.size(); ++c) cluster_of.insert(cluster_of.end(), quota[c], c);
    shuffle(cluster_of, rng);
  }

  boost::random::bernoulli_distribution<double> is_background(config.background_rate);
  boost::random::bernoulli_distribution<double> extra_code(config.extra_code_rate);
  boost::random::bernoulli_distribution<double> same_tech(config.internal_bias);
  boost::random::bernoulli_distribution<double> second_inventor(config.second_inventor_rate);
  boost::random::bernoulli_distribution<double> missing_year(config.missing_year_rate);
  boost::random::bernoulli_distribution<double> also_company(0.3);
  boost::random::poisson_distribution<int, double> n_cites(
      std::max(config.citations_per_record, 1e-300));
  boost::random::poisson_distribution<int, double> n_dangling(
      std::max(config.dangling_per_record, 1e-300));
  boost::random::poisson_distribution<int, double> n_npl(std::max(config.npl_per_record, 1e-300));
  boost::random::uniform_int_distribution<int> year(config.year_min, config.year_max);
  boost::random::uniform_int_distribution<std::size_t> background_code(
      0, std::size(kBackgroundCodes) - 1);
  boost::random::uniform_int_distribution<std::uint32_t> external_id(0, 99'999'999);

  const bool any_tech = std::any_of(tech_weights.begin(), tech_weights.end(),
                                    [](double w) { return w > 0.0; });
  std::optional<boost::random::discrete_distribution<std::size_t, double>> pick_tech;
  if (any_tech) pick_tech.emplace(tech_weights.begin(), tech_weights.end());

  std::vector<std::vector<std::size_t>> by_tech(config.technologies.size());
  std::vector<PatentRecord> records;
  records.reserve(n);
  std::size_t next_cluster = 0;

  for (std::size_t i = 0; i < n; ++i) {
    PatentRecord r;
    r.family_id = fmt::format("{}{:06d}", config.id_prefix, i);
    r.office = config.office;
    if (!missing_year(rng)) r.filing_year = year(rng);

    std::optional<std::size_t> tech;
    if (any_tech && !is_background(rng)) tech = (*pick_tech)(rng);
    if (tech) {
      const auto& prefixes = config.technologies[*tech].cpc_prefixes;
      boost::random::uniform_int_distribution<std::size_t> pick(0, prefixes.size() - 1);
      r.cpc_codes.push_back(extend_code(prefixes[pick(rng)], rng));
      if (extra_code(rng)) r.cpc_codes.push_back(kBackgroundCodes[background_code(rng)]);
    } else {
      r.cpc_codes.push_back(kBackgroundCodes[background_code(rng)]);
    }

    // In-corpus citations to distinct earlier records.
    const auto want = std::min<std::size_t>(
        config.citations_per_record > 0.0 ? static_cast<std::size_t>(n_cites(rng)) : 0, i);
    std::unordered_set<std::size_t> targets;
    boost::random::uniform_int_distribution<std::size_t> any_earlier(0, i == 0 ? 0 : i - 1);
    while (targets.size() < want) {
      std::size_t target;
      if (tech && !by_tech[*tech].empty() && same_tech(rng)) {
        const auto& pool = by_tech[*tech];
        boost::random::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        target = pool[pick(rng)];
      } else {
        target = any_earlier(rng);
      }
      if (targets.insert(target).second) r.cited_family_ids.push_back(records[target].family_id);
    }
    const int dangling = config.dangling_per_record > 0.0 ? n_dangling(rng) : 0;
    for (int d = 0; d < dangling; ++d) {
      auto id = fmt::format("EXT-{:08d}", external_id(rng));
      if (std::find(r.cited_family_ids.begin(), r.cited_family_ids.end(), id) ==
          r.cited_family_ids.end())
        r.cited_family_ids.push_back(std::move(id));
    }

    r.npl_total = config.npl_per_record > 0.0 ? static_cast<std::uint32_t>(n_npl(rng)) : 0;
    if (r.npl_total > 0 && config.npl_scientific_rate > 0.0) {
      boost::random::binomial_distribution<int, double> sci(static_cast<int>(r.npl_total),
                                                            config.npl_scientific_rate);
      r.npl_scientific = static_cast<std::uint32_t>(sci(rng));
    }

    if (university[i]) {
      r.sectors.insert(std::string(kUniversitySector));
      if (also_company(rng)) r.sectors.insert("COMPANY");
    } else {
      r.sectors.insert("COMPANY");
    }

    if (!unlocated[i]) {
      r.inventor_locations.push_back(draw_location(config.clusters[cluster_of[next_cluster++]], rng));
      if (second_inventor(rng)) {
        std::vector<double> w;
        for (const auto& cl : config.clusters) w.push_back(cl.weight);
        boost::random::discrete_distribution<std::size_t, double> pick(w.begin(), w.end());
        r.inventor_locations.push_back(draw_location(config.clusters[pick(rng)], rng));
      }
    }

    if (tech) by_tech[*tech].push_back(i);
    records.push_back(std::move(r));
  }
  return Corpus(config.office, std::move(records));
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

GeneratorConfig generator_config_from_json(const std::string& json_text) {
  static const std::unordered_set<std::string> known = {
      "office",          "count",          "id_prefix",           "technologies",
      "technology_mix",  "background_rate", "extra_code_rate",    "citations_per_record",
      "internal_bias",   "dangling_per_record", "npl_per_record", "npl_scientific_rate",
      "university_rate", "clusters",       "unlocated_rate",      "second_inventor_rate",
      "year_min",        "year_max",       "missing_year_rate"};
  GeneratorConfig c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.is_object()) throw ValidationError("generator config must be a JSON object");
    for (const auto& [key, _] : j.items())
      if (!known.contains(key)) throw ValidationError(fmt::format("generator config: unknown key '{}'", key));
    if (auto it = j.find("office"); it != j.end()) c.office = parse_office(it->get<std::string>());
    read(j, "count", c.count);
    read(j, "id_prefix", c.id_prefix);
    if (auto it = j.find("technologies"); it != j.end()) {
      c.technologies.clear();
      for (const auto& t : *it)
        c.technologies.push_back(make_technology(t.at("name").get<std::string>(),
                                                 t.at("short_name").get<std::string>(),
                                                 t.at("cpc_prefixes").get<std::vector<std::string>>()));
    }
    if (auto it = j.find("technology_mix"); it != j.end()) {
      if (it->is_object()) {
        for (const auto& [name, w] : it->items()) c.technology_mix.push_back({name, w.get<double>()});
      } else {
        for (const auto& s : *it)
          c.technology_mix.push_back({s.at("short_name").get<std::string>(), s.value("weight", 1.0)});
      }
    }
    read(j, "background_rate", c.background_rate);
    read(j, "extra_code_rate", c.extra_code_rate);
    read(j, "citations_per_record", c.citations_per_record);
    read(j, "internal_bias", c.internal_bias);
    read(j, "dangling_per_record", c.dangling_per_record);
    read(j, "npl_per_record", c.npl_per_record);
    read(j, "npl_scientific_rate", c.npl_scientific_rate);
    read(j, "university_rate", c.university_rate);
    if (auto it = j.find("clusters"); it != j.end()) {
      c.clusters.clear();
      for (const auto& cl : *it) {
        LocationCluster lc;
        lc.lat = cl.at("lat").get<double>();
        lc.lon = cl.at("lon").get<double>();
        lc.spread_deg = cl.value("spread_deg", 1.0);
        lc.country = cl.at("country").get<std::string>();
        if (cl.contains("region") && !cl["region"].is_null()) lc.region = cl["region"].get<std::string>();
        lc.weight = cl.value("weight", 1.0);
        c.clusters.push_back(std::move(lc));
      }
    }
    read(j, "unlocated_rate", c.unlocated_rate);
    read(j, "second_inventor_rate", c.second_inventor_rate);
    read(j, "year_min", c.year_min);
    read(j, "year_max", c.year_max);
    read(j, "missing_year_rate", c.missing_year_rate);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("generator config: {}", e.what()));
  }
  validate_config(c);
  return c;
}

std::string generator_config_to_json(const GeneratorConfig& c) {
  nlohmann::ordered_json j;
  j["office"] = std::string(to_string(c.office));
  j["count"] = c.count;
  j["id_prefix"] = c.id_prefix;
  j["technologies"] = nlohmann::ordered_json::array();
  for (const auto& t : c.technologies)
    j["technologies"].push_back({{"name", t.name}, {"short_name", t.short_name}, {"cpc_prefixes", t.cpc_prefixes}});
  j["technology_mix"] = nlohmann::ordered_json::array();
  for (const auto& s : c.technology_mix)
    j["technology_mix"].push_back({{"short_name", s.short_name}, {"weight", s.weight}});
  j["background_rate"] = c.background_rate;
  j["extra_code_rate"] = c.extra_code_rate;
  j["citations_per_record"] = c.citations_per_record;
  j["internal_bias"] = c.internal_bias;
  j["dangling_per_record"] = c.dangling_per_record;
  j["npl_per_record"] = c.npl_per_record;
  j["npl_scientific_rate"] = c.npl_scientific_rate;
  j["university_rate"] = c.university_rate;
  j["clusters"] = nlohmann::ordered_json::array();
  for (const auto& cl : c.clusters) {
    nlohmann::ordered_json o{{"lat", cl.lat}, {"lon", cl.lon}, {"spread_deg", cl.spread_deg},
                             {"country", cl.country}};
    if (cl.region) o["region"] = *cl.region;
    o["weight"] = cl.weight;
    j["clusters"].push_back(std::move(o));
  }
  j["unlocated_rate"] = c.unlocated_rate;
  j["second_inventor_rate"] = c.second_inventor_rate;
  j["year_min"] = c.year_min;
  j["year_max"] = c.year_max;
  j["missing_year_rate"] = c.missing_year_rate;
  return j.dump(2);
}

}  // namespace patentkb
