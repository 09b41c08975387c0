#pragma once

// JSON forms of distributions, access structures, schemes, source maps and
// prescribed partial-term tables.
//
//   distribution: {"variables":[{"name":"S","cardinality":4},...],
//                  "probabilities":[{"outcome":[0,1,...],"p":0.25},...]}
//   structure:    {"n":3,"minimal":[[1,2],[2,3]]}
//   scheme:       {"distribution":{...},"secret":["S"],
//                  "participants":[["X1a","X1b"],["X2"],...],"structure":{...}}

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sspid/errors.hpp"
#include "sspid/lattice.hpp"
#include "sspid/prob.hpp"
#include "sspid/secret.hpp"

namespace sspid::io {

using nlohmann::json;

/// Input distributions may miss normalization by up to this much; they are
/// rescaled when they do.
inline constexpr double kInputNormalizationTol = 1e-6;

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json to_json(const JointDistribution& dist) {
  json vars = json::array();
  for (const auto& v : dist.variables()) vars.push_back({{"name", v.name}, {"cardinality", v.cardinality}});
  json probs = json::array();
  for (const auto& [o, p] : dist.mass()) probs.push_back({{"outcome", o}, {"p", p}});
  return {{"variables", vars}, {"probabilities", probs}};
}

inline JointDistribution distribution_from_json(const json& j) {
  try {
    std::vector<VariableSpec> vars;
    for (const auto& v : j.at("variables")) {
      vars.push_back({v.at("name").get<std::string>(), v.at("cardinality").get<int>()});
    }
    MassMap mass;
    for (const auto& e : j.at("probabilities")) {
      auto o = e.at("outcome").get<Outcome>();
      if (!mass.emplace(o, e.at("p").get<double>()).second) {
        throw ParseError("outcome listed twice in distribution");
      }
    }
    return JointDistribution::renormalized(std::move(vars), std::move(mass), kInputNormalizationTol);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed distribution: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("invalid distribution: ") + e.what());
  }
}

inline JointDistribution read_distribution(const std::string& path) {
  return distribution_from_json(parse_json_text(read_file(path), path));
}

inline json to_json(const AccessStructure& st) {
  json minimal = json::array();
  for (Subset s : st.minimal().sets()) {
    json members = json::array();
    for (int i = 0; i < st.n(); ++i) {
      if (s & (Subset{1} << i)) members.push_back(i + 1);
    }
    minimal.push_back(members);
  }
  return {{"n", st.n()}, {"minimal", minimal}};
}

inline AccessStructure structure_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<Subset> sets;
    for (const auto& m : j.at("minimal")) sets.push_back(subset_from_participants(m.get<std::vector<int>>(), n));
    return AccessStructure(Antichain(n, std::move(sets)));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed access structure: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("invalid access structure: ") + e.what());
  }
}

inline json to_json(const SecretSharingScheme& scheme) {
  return {{"distribution", to_json(scheme.dist)},
          {"secret", scheme.secret},
          {"participants", scheme.participants},
          {"structure", to_json(scheme.structure)}};
}

inline SecretSharingScheme scheme_from_json(const json& j) {
  try {
    return SecretSharingScheme{distribution_from_json(j.at("distribution")),
                               j.at("secret").get<NameSet>(),
                               j.at("participants").get<std::vector<NameSet>>(),
                               structure_from_json(j.at("structure"))};
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scheme: ") + e.what());
  }
}

/// Sources as inline JSON (`[["X1"],["X2","X3"]]`) or a path to such a file.
inline std::vector<NameSet> parse_sources(const std::string& text_or_path) {
  std::string text = text_or_path;
  if (!text.empty() && text.front() != '[') text = read_file(text_or_path);
  const json j = parse_json_text(text, "sources");
  try {
    auto out = j.get<std::vector<NameSet>>();
    if (out.empty()) throw ParseError("sources list is empty");
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("sources must be a list of name lists: ") + e.what());
  }
}

/// `{"{1}{23}": 1.0, ...}` keyed by antichain text.
inline std::map<Antichain, double> parse_partials(const json& j, int n) {
  if (!j.is_object()) throw ParseError("prescribed values must be a JSON object keyed by antichain text");
  std::map<Antichain, double> out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ParseError("value for '" + key + "' is not a number");
    const auto node = Antichain::parse(key, n);
    if (!out.emplace(node, value.get<double>()).second) {
      throw ParseError("antichain '" + key + "' listed twice");
    }
  }
  return out;
}

}  // namespace sspid::io
