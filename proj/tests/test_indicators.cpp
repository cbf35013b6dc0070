#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "patentkb/indicators.hpp"

using namespace patentkb;
using fixtures::rec;

namespace {

PatentRecord npl(std::string id, std::uint32_t sci, std::uint32_t total, std::vector<std::string> cites = {}) {
  auto r = rec(std::move(id), {"Y02E 10/5"}, std::move(cites));
  r.npl_scientific = sci;
  r.npl_total = total;
  return r;
}

PatentSet set_of(const Corpus& c) { return all_patents(c); }

void expect_rel(double got, double want, const std::string& what) {
  const double scale = std::max(std::abs(want), 1e-300);
  EXPECT_LE(std::abs(got - want) / scale, 1e-12) << what << " got " << got << " want " << want;
}

}  // namespace

TEST(ScienceDependence, Examples) {
  const Corpus c(Office::EP, {npl("A", 1, 1), npl("B", 2, 3), npl("C", 0, 0)});
  const auto s = science_dependence(set_of(c));
  EXPECT_DOUBLE_EQ(s.mean, 1.0);
  EXPECT_DOUBLE_EQ(s.std_dev, 1.0);
  EXPECT_EQ(s.defined, 3u);

  const Corpus zero(Office::EP, {npl("A", 0, 2), npl("B", 0, 0)});
  EXPECT_EQ(science_dependence(set_of(zero)).mean, 0.0);
  EXPECT_THROW(science_dependence({}), ValidationError);
}

TEST(Sdf, PatentLevel) {
  EXPECT_EQ(sdf_patent(npl("A", 2, 2, {"X", "Y"})), 0.5);
  EXPECT_FALSE(sdf_patent(npl("A", 0, 0)).has_value());
  EXPECT_EQ(sdf_patent(npl("A", 0, 1)), 0.0);
  EXPECT_EQ(sdf_patent(npl("A", 3, 3)), 1.0);
}

TEST(Sdf, TechnologyLevelExcludesUndefined) {
  const Corpus c(Office::EP, {npl("A", 1, 1, {"X"}), npl("B", 0, 0), npl("C", 0, 2)});
  const auto s = sdf_technology(set_of(c));
  EXPECT_DOUBLE_EQ(s.mean, 0.25);
  EXPECT_EQ(s.defined, 2u);
  EXPECT_EQ(s.undefined, 1u);

  const Corpus zeros(Office::EP, {npl("A", 0, 1), npl("B", 0, 4)});
  EXPECT_EQ(sdf_technology(set_of(zeros)).mean, 0.0);
  const Corpus none(Office::EP, {npl("A", 0, 0)});
  EXPECT_THROW(sdf_technology(set_of(none)), ValidationError);
}

TEST(UniversityFraction, Counting) {
  std::vector<PatentRecord> recs = {npl("A", 0, 0), npl("B", 0, 0), npl("C", 0, 0), npl("D", 0, 0)};
  recs[0].sectors = {"UNIVERSITY"};
  recs[2].sectors = {"UNIVERSITY", "COMPANY"};
  recs[3].sectors = {"COMPANY"};
  const Corpus c(Office::EP, recs);
  EXPECT_DOUBLE_EQ(university_fraction(set_of(c)), 0.5);
  const Corpus none(Office::EP, {npl("A", 0, 0)});
  EXPECT_EQ(university_fraction(set_of(none)), 0.0);
  EXPECT_THROW(university_fraction({}), ValidationError);
}

TEST(UniversityFraction, PlantedRate) {
  GeneratorConfig config;
  config.count = 1000;
  config.university_rate = 0.1;
  const Corpus c = generate_synthetic(config, 77);
  EXPECT_EQ(university_fraction(set_of(c)), 100.0 / 1000.0);
}

TEST(InternalDependence, Examples) {
  // A cites three members, B one, C two.
  const Corpus c(Office::EP, {rec("M1", {"Y02E 10/5"}), rec("M2", {"Y02E 10/5"}), rec("M3", {"Y02E 10/5"}),
                              rec("O", {"Y02C"}),
                              rec("A", {"Y02E 10/5"}, {"M1", "M2", "M3", "O"}),
                              rec("B", {"Y02E 10/5"}, {"M1", "O"}),
                              rec("C", {"Y02E 10/5"}, {"M1", "M2"})});
  const auto g = build_graph(c);
  const auto scope = ReferenceScope::technology(make_technology("pv", "pv", {"Y02E 10/5"}));
  const PatentSet abc = {c.find("A"), c.find("B"), c.find("C")};
  EXPECT_DOUBLE_EQ(internal_dependence(abc, g, scope, c).mean, 2.0);

  EXPECT_EQ(idf_patent(*c.find("A"), g, scope, c), 0.75);
  EXPECT_EQ(idf_patent(*c.find("B"), g, scope, c), 0.5);
  EXPECT_FALSE(idf_patent(*c.find("M1"), g, scope, c).has_value());
  const auto idf = idf_technology(abc, g, scope, c);
  EXPECT_DOUBLE_EQ(idf.mean, (0.75 + 0.5 + 1.0) / 3.0);

  const PatentSet isolated = {c.find("M1"), c.find("O")};
  EXPECT_EQ(internal_dependence(isolated, g, scope, c).mean, 0.0);
  EXPECT_THROW(idf_technology(isolated, g, scope, c), ValidationError);
  EXPECT_EQ(relative_internal_dependence(isolated, g, scope, c), 0.0);
}

TEST(RelativeInternalDependence, Arithmetic) {
  EXPECT_DOUBLE_EQ(relative_internal_dependence(4.0, 10), 0.4);
  EXPECT_NEAR(relative_internal_dependence(7.09, 31490), 2.2515e-4, 5e-9);
  EXPECT_THROW(relative_internal_dependence(1.0, 0), ValidationError);

  // 10 patents, 40 internal references in total.
  std::vector<PatentRecord> recs;
  for (int i = 0; i < 5; ++i) recs.push_back(rec("T" + std::to_string(i), {"Y02E 10/5"}));
  for (int i = 0; i < 5; ++i)
    recs.push_back(rec("S" + std::to_string(i), {"Y02E 10/5"},
                       i < 4 ? std::vector<std::string>{"T0", "T1", "T2", "T3", "T4"}
                             : std::vector<std::string>{"T0", "T1", "T2", "T3", "T4", "S0", "S1", "S2", "S3"}));
  // 4*5 + 9 = 29; top up with T-to-T citations to reach 40.
  recs[1].cited_family_ids = {"T0"};
  recs[2].cited_family_ids = {"T0", "T1"};
  recs[3].cited_family_ids = {"T0", "T1", "T2"};
  recs[4].cited_family_ids = {"T0", "T1", "T2", "T3", "S0"};
  const Corpus c(Office::EP, recs);
  const auto tech = make_technology("pv", "pv", {"Y02E 10/5"});
  const auto row = compute_indicator_row(tech, c, build_graph(c));
  EXPECT_EQ(row.n_patents, 10u);
  EXPECT_DOUBLE_EQ(row.id.mean, 4.0);
  EXPECT_DOUBLE_EQ(row.rid, 0.4);
}

TEST(IndicatorRow, MatchesNaiveOracle) {
  const auto europe = default_europe_set();
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    const Corpus c = fixtures::synthetic(180, seed);
    const auto g = build_graph(c);
    for (const auto& tech : default_technologies()) {
      const auto want = oracle::indicators(c.records(), tech.cpc_prefixes, europe);
      if (want.n == 0) continue;
      const auto row = compute_indicator_row(tech, c, g);
      EXPECT_EQ(row.n_patents, want.n);
      expect_rel(row.sd.mean, want.sd, "sd");
      expect_rel(row.uf, want.uf, "uf");
      expect_rel(row.id.mean, want.id, "id");
      expect_rel(row.rid, want.rid, "rid");
      ASSERT_EQ(row.sdf.has_value(), want.sdf.has_value());
      if (want.sdf) expect_rel(row.sdf->mean, *want.sdf, "sdf");
      ASSERT_EQ(row.idf.has_value(), want.idf.has_value());
      if (want.idf) expect_rel(row.idf->mean, *want.idf, "idf");
      EXPECT_EQ(row.rid * static_cast<double>(row.n_patents) == row.id.mean ||
                    std::abs(row.rid * static_cast<double>(row.n_patents) - row.id.mean) <=
                        std::numeric_limits<double>::epsilon() * row.id.mean,
                true);
    }
  }
}

TEST(IndicatorRow, Invariances) {
  Corpus c = fixtures::synthetic(150, 55);
  const auto tech = find_technology(default_technologies(), "wind");
  const auto base = compute_indicator_row(tech, c, build_graph(c));

  // sd ignores patent citations; id ignores NPL counts.
  auto no_cites = c.records();
  for (auto& r : no_cites) r.cited_family_ids.clear();
  const Corpus c1(Office::EP, no_cites);
  EXPECT_EQ(compute_indicator_row(tech, c1, build_graph(c1)).sd.mean, base.sd.mean);

  auto more_npl = c.records();
  for (auto& r : more_npl) r.npl_total += 3;
  const Corpus c2(Office::EP, more_npl);
  const auto row2 = compute_indicator_row(tech, c2, build_graph(c2));
  EXPECT_EQ(row2.id.mean, base.id.mean);
  EXPECT_EQ(row2.idf->mean, base.idf->mean);

  // Shuffling record order leaves sd unchanged.
  auto reversed = c.records();
  std::reverse(reversed.begin(), reversed.end());
  const Corpus c3(Office::EP, reversed);
  EXPECT_DOUBLE_EQ(compute_indicator_row(tech, c3, build_graph(c3)).sd.mean, base.sd.mean);

  EXPECT_GE(base.sdf->mean, 0.0);
  EXPECT_LE(base.sdf->mean, 1.0);
  EXPECT_GE(base.idf->mean, 0.0);
  EXPECT_LE(base.idf->mean, 1.0);
}

TEST(IndicatorRow, AllScientificAndAllInternalGiveOne) {
  std::vector<PatentRecord> recs = {npl("A", 2, 2), npl("B", 1, 1, {"A"}), npl("C", 0, 0, {"A", "B"})};
  recs[2].npl_total = 0;
  const Corpus c(Office::EP, recs);
  auto sci_only = recs;
  for (auto& r : sci_only) r.cited_family_ids.clear();
  const Corpus c2(Office::EP, sci_only);
  const auto tech = make_technology("pv", "pv", {"Y02E 10/5"});
  EXPECT_EQ(compute_indicator_row(tech, c2, build_graph(c2)).sdf->mean, 1.0);
  EXPECT_EQ(compute_indicator_row(tech, c, build_graph(c)).idf->mean, 1.0);
}

TEST(IndicatorRow, EmptyTechnologyThrows) {
  const Corpus c(Office::EP, {rec("A", {"Y02C"})});
  EXPECT_THROW(compute_indicator_row(make_technology("pv", "pv", {"Y02E 10/5"}), c, build_graph(c)),
               ValidationError);
}

TEST(IndicatorCsv, ShapeAndEmptyCells) {
  const Corpus c(Office::EP, {npl("A", 0, 0), npl("B", 0, 0)});
  IndicatorTable t;
  t.rows.push_back(compute_indicator_row(make_technology("pv", "pv", {"Y02E 10/5"}), c, build_graph(c)));
  std::ostringstream out;
  write_indicator_csv(out, t);
  EXPECT_EQ(out.str(),
            "technology,n_patents,sd,sd_std,sdf,sdf_std,sdf_defined,uf,id,id_std,idf,idf_std,idf_defined,rid\n"
            "pv,2,0,0,,,0,0,0,0,,,0,0\n");
}
