#include <gtest/gtest.h>

#include <cmath>

#include "sspid/errors.hpp"
#include "sspid/experiments.hpp"
#include "sspid/measures.hpp"
#include "support/testing.hpp"

using namespace sspid;

namespace {

Antichain ac(const char* text, int n = 3) { return Antichain::parse(text, n); }
JointDistribution bit(const std::string& name = "S") { return JointDistribution::uniform({{name, 2}}); }

const std::vector<NameSet> kXorSources = {{"X1"}, {"X2"}, {"X3"}};

// S = (X1, X2) with independent uniform bits, as a 4-symbol S.
JointDistribution copy_pair() {
  MassMap m;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m[{2 * a + b, a, b}] = 0.25;
  }
  return JointDistribution({{"S", 4}, {"X1", 2}, {"X2", 2}}, m);
}

SchemeCombination disjoint_pair() {
  return combine({construct_isn(AccessStructure(ac("{1}", 2)), bit()),
                  construct_isn(AccessStructure(ac("{2}", 2)), bit())});
}

}  // namespace

TEST(ParseMeasure, NamesRoundTrip) {
  for (auto k : {MeasureKind::kIMin, MeasureKind::kIMmi, MeasureKind::kReference, MeasureKind::kBrojaPair}) {
    EXPECT_EQ(parse_measure(measure_name(k)), k);
  }
  EXPECT_EQ(parse_measure("i_mmi"), MeasureKind::kIMmi);
  EXPECT_THROW(parse_measure("ired"), ArgumentError);
}

TEST(IMmi, Examples) {
  const auto x = experiments::xor_system();
  EXPECT_NEAR(i_mmi(x, {"S"}, ac("{12}"), kXorSources), mutual_information(x, {"S"}, {"X1", "X2"}), 1e-12);
  EXPECT_NEAR(i_mmi(x, {"S"}, ac("{1}{23}"), kXorSources), 1.0, 1e-12);
  EXPECT_NEAR(i_mmi(x, {"S"}, ac("{1}{2}"), kXorSources), 1.0, 1e-12);
  EXPECT_THROW(i_mmi(x, {"S"}, ac("{1}{2}"), {{"X1"}, {"X2"}}), ArgumentError);
  EXPECT_THROW(i_mmi(x, {"X1"}, ac("{1}{2}"), kXorSources), ArgumentError);
}

TEST(IMin, Examples) {
  const auto x = experiments::xor_system();
  EXPECT_NEAR(i_min(x, {"S"}, ac("{23}"), kXorSources), 2.0, 1e-12);
  EXPECT_NEAR(i_min(x, {"S"}, ac("{1}{2}"), kXorSources), 1.0, 1e-12);
  EXPECT_NEAR(i_min(copy_pair(), {"S"}, ac("{1}{2}", 2), {{"X1"}, {"X2"}}), 1.0, 1e-12);
}

TEST(BrojaPair, NodeShapes) {
  const auto x = experiments::xor_system();
  EXPECT_NEAR(broja_pair(x, {"S"}, ac("{3}"), kXorSources), 1.0, 1e-12);
  EXPECT_NEAR(broja_pair(x, {"S"}, ac("{1}{2}"), kXorSources), 0.0, 1e-4);
  EXPECT_TRUE(std::isnan(broja_pair(x, {"S"}, ac("{1}{2}{3}"), kXorSources)));
}

TEST(EvaluateLattice, XorImmiIsMonotone) {
  const auto lat = enumerate_antichains(3);
  const auto e = evaluate_lattice(MeasureSpec{MeasureKind::kIMmi, nullptr, {}}, experiments::xor_system(), {"S"}, lat,
                                  kXorSources);
  EXPECT_EQ(e.valuation.cumulative.size(), 18u);
  EXPECT_TRUE(e.monotone());
  EXPECT_NEAR(e.valuation.cumulative[lat.index_of(ac("{1}{23}"))], 1.0, 1e-12);
}

TEST(EvaluateLattice, ReferenceNeedsCombination) {
  const auto lat = enumerate_antichains(2);
  EXPECT_THROW(evaluate_lattice(MeasureSpec{MeasureKind::kReference, nullptr, {}}, copy_pair(), {"S"}, lat,
                                {{"X1"}, {"X2"}}),
               ArgumentError);
  EXPECT_THROW(evaluate_lattice(MeasureSpec{MeasureKind::kIMmi, nullptr, {}}, copy_pair(), {"S"}, lat, {{"X1"}}),
               ArgumentError);
}

TEST(EvaluateLattice, ReferenceOnDisjointSingletonPair) {
  const auto lat = enumerate_antichains(2);
  const auto e = evaluate_reference(disjoint_pair(), lat);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const auto t = lat.node(i).text();
    EXPECT_NEAR(e.valuation.partial[i], (t == "{1}" || t == "{2}") ? 1.0 : 0.0, 1e-12) << t;
  }
}

TEST(CheckSsp, HoldsOnAllIsnSchemes) {
  const auto lat = enumerate_antichains(3);
  for (const auto& a : lat.nodes()) {
    const auto s = construct_isn(AccessStructure(a), bit());
    for (auto k : {MeasureKind::kIMin, MeasureKind::kIMmi, MeasureKind::kReference}) {
      const auto r = check_ssp(MeasureSpec{k, nullptr, {}}, s, lat);
      EXPECT_TRUE(r.pass) << measure_name(k) << " on " << a.text() << " max dev " << r.max_deviation;
    }
  }
}

TEST(CheckSsp, CyclicExampleAndPrecondition) {
  const auto lat = enumerate_antichains(3);
  const auto s = construct_cyclic_example();
  EXPECT_TRUE(check_ssp(MeasureSpec{MeasureKind::kIMin, nullptr, {}}, s, lat).pass);
  const auto rest = marginalize(s.dist, {"S", "A1", "B1", "B2", "C1", "C2"});
  SecretSharingScheme broken{product({rest, bit("A2")}), s.secret, s.participants, s.structure};
  EXPECT_THROW(check_ssp(MeasureSpec{MeasureKind::kIMmi, nullptr, {}}, broken, lat), PreconditionError);
}

TEST(CheckPairwiseSsp, DisjointSingletonPair) {
  const auto lat = enumerate_antichains(2);
  const auto c = disjoint_pair();
  EXPECT_TRUE(check_pairwise_ssp(MeasureSpec{MeasureKind::kReference, nullptr, {}}, c, lat).pass);
  EXPECT_TRUE(check_pairwise_ssp(MeasureSpec{MeasureKind::kBrojaPair, nullptr, {}}, c, lat).pass);
  const std::size_t pair_node = lat.index_of(ac("{1}{2}", 2));
  for (auto k : {MeasureKind::kIMmi, MeasureKind::kIMin}) {
    const auto r = check_pairwise_ssp(MeasureSpec{k, nullptr, {}}, c, lat);
    EXPECT_FALSE(r.pass);
    ASSERT_EQ(r.deviations.size(), 1u);
    EXPECT_EQ(r.deviations[0].node, pair_node);
    EXPECT_NEAR(r.deviations[0].value, 1.0, 1e-12);
    EXPECT_NEAR(r.deviations[0].expected, 0.0, 1e-12);
  }
  EXPECT_THROW(check_pairwise_ssp(MeasureSpec{}, combine({construct_isn(AccessStructure(ac("{1}", 2)), bit())}), lat),
               ArgumentError);
}

TEST(MeasureProperties, RandomDistributions) {
  sspid::testing::Rng rng(9);
  const auto lat = enumerate_antichains(3);
  for (int t = 0; t < 30; ++t) {
    const auto d = sspid::testing::random_distribution(
        rng, {{"S", 3}, {"X1", 2}, {"X2", 2}, {"X3", 2}}, t % 2 == 0 ? 0.0 : 0.4);
    for (auto k : {MeasureKind::kIMin, MeasureKind::kIMmi}) {
      const auto e = evaluate_lattice(MeasureSpec{k, nullptr, {}}, d, {"S"}, lat, kXorSources);
      EXPECT_TRUE(e.monotone()) << measure_name(k);
      for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto& node = lat.node(i);
        double bound = 1e300;
        for (Subset a : node.sets()) bound = std::min(bound, mutual_information(d, {"S"}, shares_of(kXorSources, a)));
        EXPECT_LE(e.valuation.cumulative[i], bound + 1e-9);
        if (node.size() == 1) {
          EXPECT_NEAR(e.valuation.cumulative[i], bound, 1e-9);
        }
      }
    }
  }
}

TEST(MeasureProperties, EpsilonContinuityOfImmi) {
  const auto lat = enumerate_antichains(3);
  auto values = [&](double eps) {
    return evaluate_lattice(MeasureSpec{MeasureKind::kIMmi, nullptr, {}}, experiments::noisy_xor_system(eps), {"S"},
                            lat, kXorSources)
        .valuation.cumulative;
  };
  double prev_gap = 1e300;
  for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
    for (double e0 : {0.05, 0.2, 0.4}) {
      const auto a = values(e0), b = values(e0 + h);
      double gap = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
      EXPECT_LE(gap, 10.0 * h);
      if (e0 == 0.05) {
        EXPECT_LE(gap, prev_gap);
        prev_gap = gap;
      }
    }
  }
}
