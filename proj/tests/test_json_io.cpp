#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "sspid/errors.hpp"
#include "sspid/json_io.hpp"
#include "support/testing.hpp"

using namespace sspid;
using nlohmann::json;

TEST(DistributionJson, RoundTripIsExact) {
  sspid::testing::Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const auto d = sspid::testing::random_distribution(rng, sspid::testing::random_variables(rng, 3, 4), 0.3);
    const auto text = io::to_json(d).dump();
    const auto back = io::distribution_from_json(io::parse_json_text(text, "test"));
    EXPECT_EQ(back.variables(), d.variables());
    EXPECT_EQ(back.mass(), d.mass());
  }
}

TEST(DistributionJson, RenormalizesWithinTolerance) {
  const auto j = json::parse(R"({"variables":[{"name":"A","cardinality":2}],
    "probabilities":[{"outcome":[0],"p":0.5},{"outcome":[1],"p":0.5000005}]})");
  const auto d = io::distribution_from_json(j);
  EXPECT_NEAR(d.probability({0}) + d.probability({1}), 1.0, 1e-15);
  const auto bad = json::parse(R"({"variables":[{"name":"A","cardinality":2}],
    "probabilities":[{"outcome":[0],"p":0.5},{"outcome":[1],"p":0.6}]})");
  EXPECT_THROW(io::distribution_from_json(bad), ParseError);
}

TEST(DistributionJson, MalformedInput) {
  try {
    io::parse_json_text("{\"variables\": [\n  {\"name\": }\n]}", "dist.json");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(io::distribution_from_json(json::parse(R"({"variables":[]})")), ParseError);
  EXPECT_THROW(io::distribution_from_json(json::parse(R"({"variables":[{"name":"A","cardinality":2}],
    "probabilities":[{"outcome":[0],"p":0.5},{"outcome":[0],"p":0.5}]})")),
               ParseError);
  EXPECT_THROW(io::read_distribution("/nonexistent/dist.json"), ParseError);
}

TEST(StructureJson, RoundTrip) {
  const AccessStructure a(Antichain::parse("{12}{23}", 3));
  const auto j = io::to_json(a);
  EXPECT_EQ(j.dump(), R"({"minimal":[[1,2],[2,3]],"n":3})");
  EXPECT_EQ(io::structure_from_json(j), a);
  EXPECT_THROW(io::structure_from_json(json::parse(R"({"n":3,"minimal":[[1],[1,2]]})")), ParseError);
}

TEST(SchemeJson, RoundTrip) {
  const auto s = construct_cyclic_example();
  const auto back = io::scheme_from_json(json::parse(io::to_json(s).dump()));
  EXPECT_EQ(back.dist.mass(), s.dist.mass());
  EXPECT_EQ(back.secret, s.secret);
  EXPECT_EQ(back.participants, s.participants);
  EXPECT_EQ(back.structure, s.structure);
}

TEST(Sources, InlineAndFile) {
  EXPECT_EQ(io::parse_sources(R"([["X1"],["X2","X3"]])"), (std::vector<NameSet>{{"X1"}, {"X2", "X3"}}));
  const std::string path = ::testing::TempDir() + "sources.json";
  std::ofstream(path) << R"([["A"]])";
  EXPECT_EQ(io::parse_sources(path), (std::vector<NameSet>{{"A"}}));
  std::remove(path.c_str());
  EXPECT_THROW(io::parse_sources("[]"), ParseError);
  EXPECT_THROW(io::parse_sources("[1,2]"), ParseError);
}

TEST(Partials, ParsedByAntichainText) {
  const auto m = io::parse_partials(json::parse(R"({"{1}{23}":1,"{12}{13}{23}":2.5})"), 3);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.at(Antichain::parse("{12}{13}{23}", 3)), 2.5);
  EXPECT_THROW(io::parse_partials(json::parse(R"({"{1}{12}":1})"), 3), ParseError);
  EXPECT_THROW(io::parse_partials(json::parse(R"({"{1}{23}":1,"{23}{1}":2})"), 3), ParseError);
  EXPECT_THROW(io::parse_partials(json::parse(R"({"{1}":"x"})"), 3), ParseError);
  EXPECT_THROW(io::parse_partials(json::parse("[1]"), 3), ParseError);
}
