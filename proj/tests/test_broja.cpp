#include <gtest/gtest.h>

#include <cmath>

#include "sspid/broja.hpp"
#include "sspid/errors.hpp"
#include "sspid/secret.hpp"
#include "support/testing.hpp"

using namespace sspid;

namespace {

JointDistribution gate(int (*f)(int, int)) {
  MassMap m;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m[{f(a, b), a, b}] = 0.25;
  }
  return JointDistribution({{"S", 2}, {"X", 2}, {"Y", 2}}, m);
}

BivariateInstance xor_gate() { return make_bivariate(gate([](int a, int b) { return a ^ b; }), {"S"}, {"X"}, {"Y"}); }
BivariateInstance and_gate() { return make_bivariate(gate([](int a, int b) { return a & b; }), {"S"}, {"X"}, {"Y"}); }

// Weak-identity instance: S = (X1, X2) for independent uniform X1, X2 of size k.
BivariateInstance copy_pair(int k) {
  const auto d = JointDistribution::uniform({{"X1", k}, {"X2", k}});
  return make_bivariate(d, {"X1", "X2"}, {"X1"}, {"X2"});
}

BivariateInstance disjoint_pair() {
  const auto bit = JointDistribution::uniform({{"S", 2}});
  const auto c = combine({construct_isn(AccessStructure(Antichain::parse("{1}", 2)), bit),
                          construct_isn(AccessStructure(Antichain::parse("{2}", 2)), bit)});
  return make_bivariate(c.dist.materialize(), c.all_secrets(), c.participants[0], c.participants[1]);
}

BivariateInstance random_binary(std::uint64_t seed) {
  sspid::testing::Rng rng(seed);
  const auto d = sspid::testing::random_distribution(rng, {{"S", 2}, {"X", 2}, {"Y", 2}});
  return make_bivariate(d, {"S"}, {"X"}, {"Y"});
}

double h_cond(const DeltaPPoint& q, const BivariateInstance& inst) {
  NameSet xy = inst.x;
  xy.insert(xy.end(), inst.y.begin(), inst.y.end());
  return conditional_entropy(q.q, inst.s, xy);
}

}  // namespace

TEST(MakeBivariate, CopiesOverlappingVariables) {
  const auto d = JointDistribution::uniform({{"A", 2}, {"B", 2}});
  const auto inst = make_bivariate(d, {"A", "B"}, {"A"}, {"B"});
  EXPECT_EQ(inst.x.size(), 1u);
  EXPECT_NE(inst.x[0], "A");
  EXPECT_NEAR(mutual_information(inst.dist, inst.s, inst.x), 1.0, 1e-12);
  EXPECT_THROW(make_bivariate(d, {"A"}, {}, {"B"}), ArgumentError);
  EXPECT_THROW(make_bivariate(d, {"A"}, {"Q"}, {"B"}), NameError);
}

TEST(QStar, FeasibleAndFixesConditionallyIndependentP) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = random_binary(seed);
    EXPECT_LE(marginal_residual(inst, qstar_product(inst)), 1e-12);
  }
  // X and Y independent given S: Q* = P.
  MassMap m;
  for (int s = 0; s < 2; ++s) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) m[{s, x, y}] = 0.5 * (s == x ? 0.7 : 0.3) * (y == 0 ? 0.4 : 0.6);
    }
  }
  const auto inst = make_bivariate(JointDistribution({{"S", 2}, {"X", 2}, {"Y", 2}}, m), {"S"}, {"X"}, {"Y"});
  const auto q = qstar_product(inst);
  for (const auto& [o, p] : inst.dist.mass()) EXPECT_NEAR(q.q.probability(o), p, 1e-12);
  const auto opt = optimize_delta_p(inst);
  EXPECT_NEAR(h_cond(opt, inst), conditional_entropy(inst.dist, {"S"}, {"X", "Y"}), 1e-6);
}

TEST(QStar, DisjointSingletonPairDeterminesSecrets) {
  const auto inst = disjoint_pair();
  EXPECT_NEAR(h_cond(qstar_product(inst), inst), 0.0, 1e-12);
}

TEST(Optimize, XorGateReachesOneBit) {
  const auto inst = xor_gate();
  const auto q = optimize_delta_p(inst);
  EXPECT_NEAR(h_cond(q, inst), 1.0, 1e-6);
  EXPECT_LE(marginal_residual(inst, q), 1e-7);
}

TEST(Optimize, NeverBelowP) {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    sspid::testing::Rng rng(seed);
    const auto d = sspid::testing::random_distribution(rng, {{"S", 3}, {"X", 3}, {"Y", 2}}, 0.3);
    const auto inst = make_bivariate(d, {"S"}, {"X"}, {"Y"});
    const auto q = optimize_delta_p(inst);
    EXPECT_LE(marginal_residual(inst, q), 1e-7);
    EXPECT_GE(h_cond(q, inst), conditional_entropy(d, {"S"}, {"X", "Y"}) - 1e-6);
    EXPECT_GE(h_cond(q, inst), h_cond(qstar_product(inst), inst) - 1e-6);
    // Co-information is symmetric in x and y at the same Q.
    const double sx = mutual_information(q.q, {"S"}, {"X"}) - conditional_mutual_information(q.q, {"S"}, {"X"}, {"Y"});
    const double sy = mutual_information(q.q, {"S"}, {"Y"}) - conditional_mutual_information(q.q, {"S"}, {"Y"}, {"X"});
    EXPECT_NEAR(sx, sy, 1e-9);
    EXPECT_GE(si_tilde(inst), -1e-6);
  }
}

TEST(SiTilde, WeakIdentity) {
  for (int k : {2, 3, 4}) EXPECT_LE(si_tilde(copy_pair(k)), 1e-4) << k;
}

TEST(SiTilde, DisjointSingletonPairIsZero) { EXPECT_NEAR(si_tilde(disjoint_pair()), 0.0, 1e-4); }

TEST(SiTilde, AndGateMatchesOracleValue) {
  // Oracle output on a 1001-point grid, frozen to six decimals.
  EXPECT_NEAR(oracle_si_tilde(and_gate(), 1001), 0.311278, 1e-6);
  EXPECT_NEAR(si_tilde(and_gate()), 0.311278, 1e-6);
}

TEST(SiTilde, ConvergenceErrorCarriesBestValue) {
  SolverOptions opt;
  opt.max_iterations = 1;
  opt.tol = 1e-12;
  try {
    si_tilde(random_binary(4), opt);
    SUCCEED();  // converged in one step
  } catch (const ConvergenceError& e) {
    EXPECT_TRUE(std::isfinite(e.best_value()));
  }
}

TEST(Oracle, AgreesWithSolver) {
  std::vector<BivariateInstance> cases = {xor_gate(), and_gate(), disjoint_pair(), random_binary(101),
                                          random_binary(202), random_binary(303)};
  for (const auto& inst : cases) {
    EXPECT_NEAR(si_tilde(inst), oracle_si_tilde(inst, 201), 2e-3);
  }
  EXPECT_NEAR(oracle_si_tilde(xor_gate(), 101), 0.0, 1e-3);
  EXPECT_NEAR(oracle_si_tilde(disjoint_pair(), 101), 0.0, 1e-3);
}

TEST(Oracle, RejectsLargeInstances) {
  sspid::testing::Rng rng(5);
  const auto d = sspid::testing::random_distribution(rng, {{"S", 2}, {"X", 3}, {"Y", 3}});
  EXPECT_THROW(oracle_si_tilde(make_bivariate(d, {"S"}, {"X"}, {"Y"}), 11), CapacityError);
  EXPECT_THROW(oracle_si_tilde(xor_gate(), 1), ArgumentError);
}
