// sspid: lattice listings, decompositions and the named experiments.
//
// Exit status: 0 when every verdict passes, 1 when a verdict fails,
// 2 on bad input.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sspid/experiments.hpp"
#include "sspid/json_io.hpp"

namespace {

using namespace sspid;
namespace ex = sspid::experiments;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + out_path + "'");
  out << text;
}

int status(bool pass) { return pass ? 0 : 1; }

// Random-property sweep for --seed.
ex::ExperimentReport random_check(std::uint64_t seed, int count, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> card(2, 3);
  ex::ExperimentReport rep;
  rep.name = "random-check";
  rep.parameters = {{"seed", std::to_string(seed)}, {"count", std::to_string(count)}};

  double chain = 0.0, symmetry = 0.0, moebius = 0.0;
  std::size_t mono_violations = 0;
  const auto lat3 = enumerate_antichains(3);
  for (int t = 0; t < count; ++t) {
    std::vector<VariableSpec> vars{{"S", card(rng)}, {"X1", card(rng)}, {"X2", card(rng)}, {"X3", 2}};
    MassMap mass;
    double total = 0.0;
    for (int s = 0; s < vars[0].cardinality; ++s) {
      for (int a = 0; a < vars[1].cardinality; ++a) {
        for (int b = 0; b < vars[2].cardinality; ++b) {
          for (int c = 0; c < 2; ++c) {
            const double w = unit(rng);
            mass[{s, a, b, c}] = w;
            total += w;
          }
        }
      }
    }
    for (auto& [o, p] : mass) p /= total;
    const auto dist = JointDistribution::renormalized(vars, mass, 1e-6);
    chain = std::max(chain, std::abs(entropy(dist, {"S", "X1"}) - entropy(dist, {"S"}) -
                                     conditional_entropy(dist, {"X1"}, {"S"})));
    symmetry = std::max(symmetry, std::abs(mutual_information(dist, {"S"}, {"X1", "X2"}) -
                                           mutual_information(dist, {"X1", "X2"}, {"S"})));
    for (auto kind : {MeasureKind::kIMin, MeasureKind::kIMmi}) {
      mono_violations +=
          evaluate_lattice(MeasureSpec{kind, nullptr, {}}, dist, {"S"}, lat3, ex::xor_sources())
              .monotonicity_violations.size();
    }
    std::vector<double> v(lat3.size());
    for (auto& x : v) x = 4.0 * unit(rng) - 2.0;
    const auto back = cumulate(lat3, moebius_invert(lat3, v).partial);
    for (std::size_t i = 0; i < v.size(); ++i) moebius = std::max(moebius, std::abs(back[i] - v[i]));
  }
  rep.verdicts.push_back(ex::verdict_at_most("max chain-rule error", chain, tol));
  rep.verdicts.push_back(ex::verdict_at_most("max MI asymmetry", symmetry, tol));
  rep.verdicts.push_back(ex::verdict_at_most("max Moebius round-trip error", moebius, tol));
  rep.verdicts.push_back(ex::Verdict{"imin/immi monotone on every sample", mono_violations == 0,
                                     static_cast<double>(mono_violations), kInfoTol});
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secret-sharing constructions and partial information decompositions"};
  app.require_subcommand(1);

  std::string out_path;
  bool parallel = false;
  double tol = 1e-9;

  auto* lattice = app.add_subcommand("lattice", "list antichain lattice nodes and cover edges");
  int lattice_n = 3;
  bool count_only = false;
  lattice->add_option("n,--n", lattice_n, "number of participants (1..5)")->required();
  lattice->add_flag("--count", count_only, "print only the node count");
  lattice->add_option("--out", out_path, "output file");

  auto* decompose = app.add_subcommand("decompose", "decompose I(target; sources) over the lattice");
  std::string dist_path, target_text = "S", sources_text, measure_text = "immi";
  decompose->add_option("--dist", dist_path, "distribution JSON file")->required();
  decompose->add_option("--target", target_text, "target variable names, comma separated");
  decompose->add_option("--sources", sources_text, "JSON list of name lists, inline or a file path");
  decompose->add_option("--measure", measure_text, "imin | immi | reference | broja-pair");
  decompose->add_option("--tol", tol, "solver tolerance for broja-pair");
  decompose->add_option("--out", out_path, "output CSV file");

  auto* xor_cmd = app.add_subcommand("xor-theorem", "negative partial term on the XOR system");
  xor_cmd->add_option("--out", out_path, "output file");

  auto* sweep = app.add_subcommand("epsilon-sweep", "noisy XOR family over a list of epsilon values");
  std::string eps_text = "0,0.01,0.1,0.25,0.5";
  std::string sweep_measures = "imin,immi,broja-pair";
  sweep->add_option("--epsilon", eps_text, "comma-separated epsilon values in [0,1]");
  sweep->add_option("--measure", sweep_measures, "comma-separated measures");
  sweep->add_flag("--parallel", parallel, "evaluate epsilon values concurrently");
  sweep->add_option("--out", out_path, "output CSV file");

  auto* prescribe = app.add_subcommand("prescribe", "build a combination with prescribed partial terms");
  int prescribe_n = 3;
  std::string h_path;
  prescribe->add_option("--n", prescribe_n, "number of participants")->required();
  prescribe->add_option("h-file,--h-file", h_path, "JSON object: antichain text -> bits")->required();
  prescribe->add_option("--out", out_path, "output file");

  auto* appendix = app.add_subcommand("verify-appendix", "two-scheme combination checks for n <= 3");
  int appendix_n = 3;
  appendix->add_option("--n", appendix_n, "number of participants (1..3)");
  appendix->add_flag("--parallel", parallel, "check structure pairs concurrently");
  appendix->add_option("--out", out_path, "output file");

  auto* random = app.add_subcommand("random-check", "randomized property checks");
  std::uint64_t seed = 1;
  int count = 100;
  random->add_option("--seed", seed, "generator seed");
  random->add_option("--count", count, "number of random samples");
  random->add_option("--tol", tol, "allowed error");
  random->add_option("--out", out_path, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*lattice) {
      emit(ex::lattice_listing(lattice_n, count_only), out_path);
      return 0;
    }
    if (*decompose) {
      const auto kind = parse_measure(measure_text);
      const auto dist = io::read_distribution(dist_path);
      const NameSet target = split_list(target_text);
      std::vector<NameSet> sources;
      if (sources_text.empty()) {
        for (const auto& name : dist.names()) {
          if (std::find(target.begin(), target.end(), name) == target.end()) sources.push_back({name});
        }
      } else {
        sources = io::parse_sources(sources_text);
      }
      const auto lat = enumerate_antichains(static_cast<int>(sources.size()));
      SolverOptions opt;
      opt.tol = decompose->count("--tol") ? tol : opt.tol;
      MeasureSpec spec{kind, nullptr, opt};
      if (kind == MeasureKind::kReference) {
        // Every target variable is read as a separate secret.
        std::vector<NameSet> secrets;
        for (const auto& t : target) secrets.push_back({t});
        spec.context = std::make_shared<const SchemeCombination>(
            combination_from_distribution(dist, secrets, sources));
      }
      const auto eval = evaluate_lattice(spec, dist, target, lat, sources);
      emit(ex::decomposition_csv(lat, eval), out_path);
      return status(eval.monotone());
    }
    if (*xor_cmd) {
      const auto rep = ex::xor_theorem();
      emit(rep.render(), out_path);
      return status(rep.pass());
    }
    if (*sweep) {
      std::vector<double> eps;
      for (const auto& e : split_list(eps_text)) {
        try {
          eps.push_back(std::stod(e));
        } catch (const std::exception&) {
          throw ArgumentError("not a number: '" + e + "'");
        }
      }
      std::vector<MeasureKind> kinds;
      for (const auto& m : split_list(sweep_measures)) kinds.push_back(parse_measure(m));
      const auto res = ex::epsilon_sweep(eps, kinds, parallel);
      emit(res.csv, out_path);
      return status(res.pass());
    }
    if (*prescribe) {
      const auto values = io::parse_partials(io::parse_json_text(io::read_file(h_path), h_path), prescribe_n);
      const auto rep = ex::prescribe(prescribe_n, values);
      emit(rep.render(), out_path);
      return status(rep.pass());
    }
    if (*appendix) {
      const auto rep = ex::verify_appendix(appendix_n, parallel);
      emit(rep.render(), out_path);
      return status(rep.pass());
    }
    if (*random) {
      const auto rep = random_check(seed, count, random->count("--tol") ? tol : 1e-9);
      emit(rep.render(), out_path);
      return status(rep.pass());
    }
  } catch (const std::exception& e) {
    std::cerr << "sspid: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
