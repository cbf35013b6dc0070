#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "patentkb/error.hpp"
#include "patentkb/synthetic.hpp"

using namespace patentkb;

TEST(Synthetic, ZeroCountIsEmpty) {
  GeneratorConfig c;
  c.count = 0;
  EXPECT_TRUE(generate_synthetic(c, 1).empty());
}

TEST(Synthetic, DeterministicPerSeed) {
  const auto a = serialize_corpus(fixtures::synthetic(120, 9));
  const auto b = serialize_corpus(fixtures::synthetic(120, 9));
  const auto c = serialize_corpus(fixtures::synthetic(120, 10));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Synthetic, OutputPassesParser) {
  for (Office office : {Office::EP, Office::US}) {
    const Corpus c = fixtures::synthetic(200, 5, office);
    std::istringstream in(serialize_corpus(c));
    ParseOptions strict;
    strict.strict = true;
    EXPECT_EQ(parse_corpus(in, office, strict).records(), c.records());
  }
}

TEST(Synthetic, CitationsPointBackwards) {
  const Corpus c = fixtures::synthetic(150, 6);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (const auto& id : c.records()[i].cited_family_ids) {
      const auto j = c.index_of(id);
      if (j) EXPECT_LT(*j, i);
      else EXPECT_EQ(id.rfind("EXT-", 0), 0u);
    }
}

TEST(Synthetic, ZeroScientificRate) {
  GeneratorConfig c;
  c.count = 300;
  c.npl_scientific_rate = 0.0;
  c.npl_per_record = 4.0;
  for (const auto& r : generate_synthetic(c, 2)) EXPECT_EQ(r.npl_scientific, 0u);
}

TEST(Synthetic, PlantedQuantitiesAreExact) {
  GeneratorConfig c;
  c.count = 1000;
  c.university_rate = 0.1;
  c.unlocated_rate = 0.05;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Corpus corpus = generate_synthetic(c, seed);
    std::size_t uni = 0, unlocated = 0;
    for (const auto& r : corpus) {
      uni += r.is_university();
      unlocated += r.inventor_locations.empty();
    }
    EXPECT_EQ(uni, 100u);
    EXPECT_EQ(unlocated, 50u);
  }
}

TEST(Synthetic, ClusterApportionmentIsExact) {
  GeneratorConfig c;
  c.count = 150;
  c.unlocated_rate = 0.0;
  c.clusters = {{50, 10, 1, "DE", std::nullopt, 5}, {40, -80, 1, "US", std::nullopt, 4},
                {35, 135, 1, "JP", std::nullopt, 3}, {47, 2, 1, "FR", std::nullopt, 2},
                {56, 10, 1, "DK", std::nullopt, 1}};
  std::map<std::string, int> first;
  for (const auto& r : generate_synthetic(c, 4)) ++first[r.inventor_locations.front().country];
  EXPECT_EQ(first, (std::map<std::string, int>{{"DE", 50}, {"US", 40}, {"JP", 30}, {"FR", 20}, {"DK", 10}}));
}

TEST(Synthetic, TechnologyMixRestrictsCodes) {
  GeneratorConfig c;
  c.count = 200;
  c.background_rate = 0.0;
  c.technology_mix = {{"wind", 1.0}, {"ccs", 1.0}};
  const auto wind = find_technology(default_technologies(), "wind");
  const auto ccs = find_technology(default_technologies(), "ccs");
  std::size_t w = 0, s = 0;
  for (const auto& r : generate_synthetic(c, 8)) {
    EXPECT_TRUE(match_technology(r, wind) || match_technology(r, ccs));
    w += match_technology(r, wind);
    s += match_technology(r, ccs);
  }
  EXPECT_GT(w, 50u);
  EXPECT_GT(s, 50u);
}

TEST(Synthetic, RejectsInfeasibleConfigs) {
  GeneratorConfig c;
  c.count = 3;
  c.citations_per_record = 5.0;  // would need self or repeated citations
  EXPECT_THROW(generate_synthetic(c, 1), ValidationError);

  GeneratorConfig rate;
  rate.university_rate = 1.5;
  EXPECT_THROW(generate_synthetic(rate, 1), ValidationError);

  GeneratorConfig nowhere;
  nowhere.clusters.clear();
  EXPECT_THROW(generate_synthetic(nowhere, 1), ValidationError);
  nowhere.unlocated_rate = 1.0;
  EXPECT_NO_THROW(generate_synthetic(nowhere, 1));

  GeneratorConfig prefix;
  prefix.id_prefix = "EXT-";
  EXPECT_THROW(generate_synthetic(prefix, 1), ValidationError);
}

TEST(Synthetic, JsonConfig) {
  const auto c = generator_config_from_json(
      R"({"count": 25, "office": "US", "technology_mix": {"wind": 2, "hydro": 1}, "university_rate": 0.2})");
  EXPECT_EQ(c.count, 25u);
  EXPECT_EQ(c.office, Office::US);
  EXPECT_EQ(c.technology_mix.size(), 2u);
  EXPECT_DOUBLE_EQ(c.university_rate, 0.2);
  EXPECT_DOUBLE_EQ(c.npl_per_record, GeneratorConfig{}.npl_per_record);

  const auto back = generator_config_from_json(generator_config_to_json(c));
  EXPECT_EQ(serialize_corpus(generate_synthetic(back, 3)), serialize_corpus(generate_synthetic(c, 3)));

  EXPECT_THROW(generator_config_from_json(R"({"cuont": 3})"), ValidationError);
  EXPECT_THROW(generator_config_from_json(R"({"count": "many"})"), ValidationError);
  EXPECT_THROW(generator_config_from_json("[1]"), ValidationError);
  EXPECT_THROW(generator_config_from_json("{"), ValidationError);
}
