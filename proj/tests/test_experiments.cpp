#include <gtest/gtest.h>

#include <sstream>

#include "sspid/errors.hpp"
#include "sspid/experiments.hpp"

using namespace sspid;
namespace ex = sspid::experiments;

namespace {

double row_value(const ex::ExperimentReport& r, const std::string& node, bool partial) {
  for (const auto& row : r.rows) {
    if (row.node == node) return partial ? row.partial : row.cumulative;
  }
  ADD_FAILURE() << "no row " << node;
  return 0.0;
}

std::vector<std::string> lines_with(const std::string& text, const std::string& needle) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find(needle) != std::string::npos) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST(FormatBits, Conventions) {
  EXPECT_EQ(ex::format_bits(1.0), "1.000000");
  EXPECT_EQ(ex::format_bits(-0.0), "0.000000");
  EXPECT_EQ(ex::format_bits(-1e-12), "0.000000");
  EXPECT_EQ(ex::format_bits(std::nan("")), "");
  EXPECT_EQ(ex::format_bits(-1.0), "-1.000000");
}

TEST(LatticeListing, CountsAndEdges) {
  EXPECT_EQ(ex::lattice_listing(3, true), "18\n");
  EXPECT_EQ(ex::lattice_listing(4, true), "166\n");
  const auto one = ex::lattice_listing(1, false);
  EXPECT_NE(one.find("\n{1}\n"), std::string::npos);
  EXPECT_THROW(ex::lattice_listing(6, true), CapacityError);
}

TEST(XorTheorem, NegativePartialAndPrintedValues) {
  const auto r = ex::xor_theorem();
  EXPECT_TRUE(r.pass()) << r.render();
  EXPECT_EQ(r.rows.size(), 18u);
  EXPECT_NEAR(row_value(r, "{12}{13}{23}", true), -1.0, 1e-9);
  EXPECT_DOUBLE_EQ(row_value(r, "{1}{23}", false), 1.0);
  const auto* si = r.find("SI~((X1,X2);X1,X2) = 0");
  ASSERT_NE(si, nullptr);
  EXPECT_LE(std::abs(si->value), 1e-4);
  // The two open nodes are labelled as bounds-derived choices.
  const auto text = r.render();
  EXPECT_NE(text.find("{12}{13}{23} := 2"), std::string::npos);
  EXPECT_NE(text.find("{1}{2}{3} := 0"), std::string::npos);
  EXPECT_EQ(text, ex::xor_theorem().render());
}

TEST(XorTheorem, DerivedValuesMatchPrintedTable) {
  const auto d = ex::xor_system();
  for (const auto& [label, value] : ex::reference_xor_values()) {
    EXPECT_NEAR(ex::derived_xor_value(d, Antichain::parse(label, 3), ex::xor_sources(), {}), value, 1e-9) << label;
  }
  EXPECT_TRUE(std::isnan(ex::derived_xor_value(d, Antichain::parse("{1}{2}{3}", 3), ex::xor_sources(), {})));
}

TEST(Decompose, XorImmiCsv) {
  const auto lat = enumerate_antichains(3);
  const auto e = evaluate_lattice(MeasureSpec{MeasureKind::kIMmi, nullptr, {}}, ex::xor_system(), {"S"}, lat,
                                  ex::xor_sources());
  const auto csv = ex::decomposition_csv(lat, e);
  EXPECT_EQ(csv.rfind("node,cumulative_bits,partial_bits\n", 0), 0u);
  EXPECT_EQ(lines_with(csv, "{1}{23},").front(), "{1}{23},1.000000,0.000000");
  EXPECT_EQ(lines_with(csv, "# monotone").front().rfind("# monotone: PASS", 0), 0u);
}

TEST(EpsilonSweep, Verdicts) {
  const std::vector<MeasureKind> kinds = {MeasureKind::kIMin, MeasureKind::kIMmi, MeasureKind::kBrojaPair};
  const auto r = ex::epsilon_sweep({0.0, 0.01, 0.1, 0.25, 0.5}, kinds);
  EXPECT_TRUE(r.pass()) << r.csv;
  EXPECT_EQ(lines_with(r.csv, "0.25,immi,").size(), 18u);
  EXPECT_EQ(lines_with(r.csv, "0.1,broja-pair,{1}{2}{3},").front(), "0.1,broja-pair,{1}{2}{3},,");
  EXPECT_EQ(r.csv, ex::epsilon_sweep({0.0, 0.01, 0.1, 0.25, 0.5}, kinds, true).csv);
  EXPECT_THROW(ex::epsilon_sweep({1.5}, kinds), ArgumentError);
  EXPECT_THROW(ex::epsilon_sweep({-0.1}, kinds), ArgumentError);
}

TEST(EpsilonSweep, NoisyFamilyEdges) {
  const auto zero = ex::noisy_xor_system(0.0);
  EXPECT_EQ(zero.mass(), ex::xor_system().mass());
  const auto half = ex::noisy_xor_system(0.5);
  EXPECT_NEAR(conditional_entropy(half, {"X3"}, {"X1", "X2"}), 1.0, 1e-12);
  EXPECT_NEAR(mutual_information(half, {"X3"}, {"X1", "X2"}), 0.0, 1e-12);
}

TEST(Prescribe, PipelineRecoversValues) {
  auto parse = [](const char* t) { return Antichain::parse(t, 3); };
  const auto r = ex::prescribe(3, {{parse("{1}{23}"), 1.0}, {parse("{12}{13}{23}"), 2.0}});
  EXPECT_TRUE(r.pass()) << r.render();
  EXPECT_NEAR(row_value(r, "{1}{23}", true), 1.0, 1e-6);
  EXPECT_NEAR(row_value(r, "{12}{13}{23}", true), 2.0, 1e-6);
  EXPECT_THROW(ex::prescribe(3, {}), ArgumentError);
}

TEST(VerifyAppendix, TwoParticipantCatalog) {
  const auto r = ex::verify_appendix(2);
  EXPECT_TRUE(r.pass()) << r.render();
  const auto st = ex::combination_catalog(2);
  EXPECT_EQ(st.pairs, 12u);
  EXPECT_EQ(st.skipped_duplicates, 4u);
  EXPECT_LE(st.joint_info, 1e-9);
  EXPECT_THROW(ex::verify_appendix(4), ArgumentError);
}

TEST(VerifyAppendix, DisjointSingletonPairOnItsOwn) {
  const auto st = ex::check_structure_pair(AccessStructure(Antichain::parse("{1}", 2)),
                                           AccessStructure(Antichain::parse("{2}", 2)));
  EXPECT_LE(st.si_tilde, 1e-4);
  EXPECT_LE(st.joint_info, 1e-9);
}
