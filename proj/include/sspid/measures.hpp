#pragma once

// Shared-information measures evaluated on lattice nodes, full-lattice
// decompositions, and checkers for the secret-sharing properties.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sspid/broja.hpp"
#include "sspid/errors.hpp"
#include "sspid/lattice.hpp"
#include "sspid/prob.hpp"
#include "sspid/secret.hpp"

namespace sspid {

/// Deviation allowed by the property checkers.
inline constexpr double kCheckerTol = 1e-6;

enum class MeasureKind { kIMin, kIMmi, kReference, kBrojaPair };

inline std::string measure_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kIMin: return "imin";
    case MeasureKind::kIMmi: return "immi";
    case MeasureKind::kReference: return "reference";
    case MeasureKind::kBrojaPair: return "broja-pair";
  }
  return "?";
}

inline MeasureKind parse_measure(const std::string& name) {
  if (name == "imin" || name == "i_min") return MeasureKind::kIMin;
  if (name == "immi" || name == "i_mmi" || name == "mmi") return MeasureKind::kIMmi;
  if (name == "reference") return MeasureKind::kReference;
  if (name == "broja-pair" || name == "broja") return MeasureKind::kBrojaPair;
  throw ArgumentError("unknown measure '" + name + "' (expected imin, immi, reference, broja-pair)");
}

/// Which measure to evaluate. The reference measure is only meaningful on a
/// combination of perfect schemes and therefore needs `context`.
struct MeasureSpec {
  MeasureKind kind = MeasureKind::kIMmi;
  std::shared_ptr<const SchemeCombination> context;
  SolverOptions solver;
};

namespace detail {

inline void check_sources(const NameSet& target, const Antichain& node,
                          const std::vector<NameSet>& sources) {
  if (static_cast<int>(sources.size()) != node.n()) {
    throw ArgumentError("expected " + std::to_string(node.n()) + " sources, got " +
                        std::to_string(sources.size()));
  }
  for (const auto& src : sources) {
    if (src.empty()) throw ArgumentError("every participant needs at least one variable");
    require_disjoint(target, src);
  }
}

/// Specific information I(S=s; X_A) for every target value s, plus p(s).
inline std::map<Outcome, std::pair<double, double>> specific_information(const JointDistribution& dist,
                                                                        const NameSet& target,
                                                                        const NameSet& names) {
  std::vector<std::size_t> tc, ac;
  for (const auto& n : target) tc.push_back(dist.index_of(n));
  for (const auto& n : names) ac.push_back(dist.index_of(n));
  std::map<Outcome, double> ps, pa;
  std::map<std::pair<Outcome, Outcome>, double> psa;
  for (const auto& [o, p] : dist.mass()) {
    Outcome s, a;
    for (auto i : tc) s.push_back(o[i]);
    for (auto i : ac) a.push_back(o[i]);
    ps[s] += p;
    pa[a] += p;
    psa[{s, a}] += p;
  }
  std::map<Outcome, std::pair<double, double>> out;  // s -> (p(s), Ispec)
  for (const auto& [s, p] : ps) out[s] = {p, 0.0};
  for (const auto& [key, p] : psa) {
    if (p <= kZeroProbability) continue;
    const double p_s = ps[key.first];
    const double p_a = pa[key.second];
    out[key.first].second += (p / p_s) * std::log2(p / (p_a * p_s));
  }
  return out;
}

}  // namespace detail

/// min over the node's sets A_i of I(target; X_{A_i}).
inline double i_mmi(const JointDistribution& dist, const NameSet& target, const Antichain& node,
                    const std::vector<NameSet>& sources) {
  detail::check_sources(target, node, sources);
  double best = std::numeric_limits<double>::infinity();
  for (Subset a : node.sets()) best = std::min(best, mutual_information(dist, target, shares_of(sources, a)));
  return best;
}

/// sum_s p(s) min_i I(S=s; X_{A_i}) with the specific information
/// I(S=s; A) = sum_a p(a|s) log2(p(s|a) / p(s)).
inline double i_min(const JointDistribution& dist, const NameSet& target, const Antichain& node,
                    const std::vector<NameSet>& sources) {
  detail::check_sources(target, node, sources);
  std::map<Outcome, double> weight, worst;
  bool first = true;
  for (Subset a : node.sets()) {
    const auto spec = detail::specific_information(dist, target, shares_of(sources, a));
    for (const auto& [s, pv] : spec) {
      weight[s] = pv.first;
      worst[s] = first ? pv.second : std::min(worst[s], pv.second);
    }
    first = false;
  }
  double v = 0.0;
  for (const auto& [s, p] : weight) v += p * worst[s];
  return detail::clamp_nonnegative(v, "I_min");
}

/// SI~ on nodes with at most two sets; self-redundancy I(target; X_A) on
/// single-set nodes; NaN (undefined) on nodes with three or more sets.
inline double broja_pair(const JointDistribution& dist, const NameSet& target, const Antichain& node,
                         const std::vector<NameSet>& sources, const SolverOptions& opt = {}) {
  detail::check_sources(target, node, sources);
  if (node.size() == 1) return mutual_information(dist, target, shares_of(sources, node.sets()[0]));
  if (node.size() > 2) return std::numeric_limits<double>::quiet_NaN();
  const auto inst = make_bivariate(dist, target, shares_of(sources, node.sets()[0]),
                                   shares_of(sources, node.sets()[1]));
  return si_tilde(inst, opt);
}

/// Value of the chosen measure at one node. For the reference measure the
/// distribution arguments are ignored and the measure's combination is used.
inline double node_value(const MeasureSpec& measure, const JointDistribution& dist, const NameSet& target,
                         const Antichain& node, const std::vector<NameSet>& sources) {
  switch (measure.kind) {
    case MeasureKind::kIMin: return i_min(dist, target, node, sources);
    case MeasureKind::kIMmi: return i_mmi(dist, target, node, sources);
    case MeasureKind::kBrojaPair: return broja_pair(dist, target, node, sources, measure.solver);
    case MeasureKind::kReference:
      if (!measure.context) {
        throw ArgumentError("the reference measure is defined only on a combination of perfect schemes");
      }
      return reference_ssp_value(*measure.context, node);
  }
  throw ArgumentError("unknown measure");
}

struct LatticeEvaluation {
  LatticeValuation valuation;
  std::vector<std::pair<std::size_t, std::size_t>> monotonicity_violations;

  bool monotone() const { return monotonicity_violations.empty(); }
};

inline LatticeEvaluation evaluate_lattice(const MeasureSpec& measure, const JointDistribution& dist,
                                          const NameSet& target, const PILattice& lattice,
                                          const std::vector<NameSet>& sources) {
  if (measure.kind == MeasureKind::kReference) {
    if (!measure.context) {
      throw ArgumentError("the reference measure is defined only on a combination of perfect schemes");
    }
    if (measure.context->n() != lattice.n()) throw ArgumentError("lattice and combination disagree on n");
  } else if (static_cast<int>(sources.size()) != lattice.n()) {
    throw ArgumentError("lattice has n=" + std::to_string(lattice.n()) + " but " +
                        std::to_string(sources.size()) + " sources were given");
  }
  std::vector<double> cumulative(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    cumulative[i] = node_value(measure, dist, target, lattice.node(i), sources);
  }
  LatticeEvaluation out;
  out.valuation = moebius_invert(lattice, cumulative);
  out.monotonicity_violations = check_monotone(lattice, cumulative);
  return out;
}

/// Reference-measure decomposition of a combination (no tabulated joint needed).
inline LatticeEvaluation evaluate_reference(const SchemeCombination& comb, const PILattice& lattice) {
  MeasureSpec m{MeasureKind::kReference, std::make_shared<const SchemeCombination>(comb), {}};
  return evaluate_lattice(m, JointDistribution{}, {}, lattice, {});
}

struct NodeDeviation {
  std::size_t node = 0;  // lattice index
  double value = 0.0;
  double expected = 0.0;
};

struct PropertyReport {
  bool pass = true;
  std::vector<NodeDeviation> deviations;
  double max_deviation = 0.0;
};

/// Secret sharing property on one perfect scheme: value H(S) where every set
/// of the node is authorized, 0 elsewhere.
inline PropertyReport check_ssp(const MeasureSpec& measure, const SecretSharingScheme& scheme,
                                const PILattice& lattice, double tol = kCheckerTol) {
  if (lattice.n() != scheme.n()) throw ArgumentError("lattice and scheme disagree on n");
  if (!check_perfect(scheme).perfect) throw PreconditionError("check_ssp needs a perfect scheme");
  MeasureSpec m = measure;
  if (m.kind == MeasureKind::kReference && !m.context) {
    m.context = std::make_shared<const SchemeCombination>(combine({scheme}));
  }
  const double hs = entropy(scheme.dist, scheme.secret);
  PropertyReport report;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto& node = lattice.node(i);
    const double v = node_value(m, scheme.dist, scheme.secret, node, scheme.participants);
    if (std::isnan(v)) continue;
    const bool all = std::all_of(node.sets().begin(), node.sets().end(),
                                 [&](Subset a) { return scheme.structure.is_authorized(a); });
    const double expected = all ? hs : 0.0;
    const double dev = std::abs(v - expected);
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tol) {
      report.pass = false;
      report.deviations.push_back({i, v, expected});
    }
  }
  return report;
}

/// Pairwise secret sharing property on a two-scheme combination: the measure
/// must reproduce the entropy of the commonly authorized secrets at every node.
inline PropertyReport check_pairwise_ssp(const MeasureSpec& measure, const SchemeCombination& comb,
                                         const PILattice& lattice, double tol = kCheckerTol) {
  if (comb.size() != 2) throw ArgumentError("pairwise property needs exactly two schemes");
  if (lattice.n() != comb.n()) throw ArgumentError("lattice and combination disagree on n");
  MeasureSpec m = measure;
  if (m.kind == MeasureKind::kReference && !m.context) {
    m.context = std::make_shared<const SchemeCombination>(comb);
  }
  const JointDistribution dist =
      m.kind == MeasureKind::kReference ? JointDistribution{} : comb.dist.materialize();
  const NameSet target = comb.all_secrets();
  PropertyReport report;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const double v = node_value(m, dist, target, lattice.node(i), comb.participants);
    if (std::isnan(v)) continue;
    const double expected = reference_ssp_value(comb, lattice.node(i));
    const double dev = std::abs(v - expected);
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tol) {
      report.pass = false;
      report.deviations.push_back({i, v, expected});
    }
  }
  return report;
}

}  // namespace sspid
