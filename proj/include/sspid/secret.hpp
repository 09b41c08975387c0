#pragma once

// Access structures, perfect secret sharing schemes (Ito-Saito-Nishizeki
// construction), independent combinations of schemes, and the reference
// shared-information values such combinations are meant to carry.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sspid/errors.hpp"
#include "sspid/lattice.hpp"
#include "sspid/prob.hpp"

namespace sspid {

inline constexpr int kMaxSchemeParticipants = 5;

/// Up-closed family of authorized participant sets, kept as its minimal antichain.
/// The empty set is never authorized (antichains exclude it).
class AccessStructure {
 public:
  AccessStructure() = default;
  explicit AccessStructure(Antichain minimal) : minimal_(std::move(minimal)) {}

  int n() const noexcept { return minimal_.n(); }
  const Antichain& minimal() const noexcept { return minimal_; }

  bool is_authorized(Subset subset) const {
    if (!is_subset(subset, full_set(n()))) throw ArgumentError("subset has participants outside 1..n");
    for (Subset m : minimal_.sets()) {
      if (is_subset(m, subset)) return true;
    }
    return false;
  }

  bool is_authorized(const std::vector<int>& participants) const {
    return is_authorized(subset_from_participants(participants, n()));
  }

  friend bool operator==(const AccessStructure&, const AccessStructure&) = default;

 private:
  Antichain minimal_;
};

/// Union of the variable names held by the participants in `subset`.
inline NameSet shares_of(const std::vector<NameSet>& participants, Subset subset) {
  NameSet out;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    if (subset & (Subset{1} << i)) out = detail::set_union(out, participants[i]);
  }
  return out;
}

struct SecretSharingScheme {
  JointDistribution dist;
  NameSet secret;
  std::vector<NameSet> participants;  // participants[i] is the share of participant i+1
  AccessStructure structure;

  int n() const { return static_cast<int>(participants.size()); }
  NameSet share(Subset subset) const { return shares_of(participants, subset); }
};

/// Secret sharing schemes over the same participants, one secret per access
/// structure. `dist` is kept factored into independent pieces when built by
/// combine(); a hand-declared combination uses a single factor.
struct SchemeCombination {
  FactoredDistribution dist;
  std::vector<NameSet> secrets;
  std::vector<NameSet> participants;
  std::vector<AccessStructure> structures;

  int n() const { return static_cast<int>(participants.size()); }
  std::size_t size() const { return secrets.size(); }
  NameSet share(Subset subset) const { return shares_of(participants, subset); }

  NameSet all_secrets() const {
    NameSet out;
    for (const auto& s : secrets) out = detail::set_union(out, s);
    return out;
  }
};

namespace detail {

inline void check_scheme_size(int n) {
  if (n < 1 || n > kMaxSchemeParticipants) {
    throw CapacityError("schemes support 1..5 participants, got " + std::to_string(n));
  }
}

}  // namespace detail

/// Ito-Saito-Nishizeki scheme over Z_k: each minimal authorized set splits the
/// secret additively, with uniform pads for all but its last member.
/// Participants outside every minimal set receive a constant variable.
inline SecretSharingScheme construct_isn(const AccessStructure& structure,
                                         const JointDistribution& secret_dist) {
  const int n = structure.n();
  detail::check_scheme_size(n);
  if (secret_dist.variables().size() != 1) {
    throw ArgumentError("secret distribution must have exactly one variable");
  }
  const VariableSpec secret_var = secret_dist.variables().front();
  const int k = secret_var.cardinality;
  if (k < 2) throw ArgumentError("secret alphabet must have at least 2 symbols");

  struct Piece {
    int owner;      // 0-based participant
    int pad_index;  // index into the pad vector, or -1 for the closing piece
    std::size_t group;
  };
  std::vector<VariableSpec> vars{secret_var};
  std::vector<Piece> pieces;
  std::vector<NameSet> participants(static_cast<std::size_t>(n));
  int pad_count = 0;
  const auto& minimal = structure.minimal().sets();
  for (std::size_t b = 0; b < minimal.size(); ++b) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (minimal[b] & (Subset{1} << i)) members.push_back(i);
    }
    for (std::size_t m = 0; m < members.size(); ++m) {
      const bool closing = m + 1 == members.size();
      std::string name = "X" + std::to_string(members[m] + 1) + "." + std::to_string(b + 1);
      if (name == secret_var.name) throw ArgumentError("secret variable name clashes with a share name");
      vars.push_back({name, k});
      pieces.push_back({members[m], closing ? -1 : pad_count, b});
      participants[static_cast<std::size_t>(members[m])].push_back(name);
      if (!closing) ++pad_count;
    }
  }
  std::vector<std::size_t> idle;
  for (int i = 0; i < n; ++i) {
    if (participants[static_cast<std::size_t>(i)].empty()) {
      std::string name = "X" + std::to_string(i + 1) + ".0";
      vars.push_back({name, 1});
      participants[static_cast<std::size_t>(i)].push_back(name);
      idle.push_back(static_cast<std::size_t>(i));
    }
  }

  std::size_t pad_combos = 1;
  for (int i = 0; i < pad_count; ++i) pad_combos *= static_cast<std::size_t>(k);
  if (static_cast<double>(pad_combos) * static_cast<double>(secret_dist.support_size()) > (1 << 22)) {
    throw CapacityError("ISN scheme support too large to tabulate");
  }
  const double pad_mass = 1.0 / static_cast<double>(pad_combos);

  MassMap mass;
  std::vector<int> pads(static_cast<std::size_t>(pad_count), 0);
  std::vector<int> group_sum(minimal.size(), 0);
  for (const auto& [secret_outcome, p] : secret_dist.mass()) {
    const int s = secret_outcome.front();
    for (std::size_t combo = 0; combo < pad_combos; ++combo) {
      std::size_t rest = combo;
      for (auto& pad : pads) {
        pad = static_cast<int>(rest % static_cast<std::size_t>(k));
        rest /= static_cast<std::size_t>(k);
      }
      std::fill(group_sum.begin(), group_sum.end(), 0);
      Outcome outcome{s};
      for (const auto& piece : pieces) {
        int value;
        if (piece.pad_index >= 0) {
          value = pads[static_cast<std::size_t>(piece.pad_index)];
          group_sum[piece.group] = (group_sum[piece.group] + value) % k;
        } else {
          value = ((s - group_sum[piece.group]) % k + k) % k;
        }
        outcome.push_back(value);
      }
      outcome.resize(outcome.size() + idle.size(), 0);
      mass[outcome] += p * pad_mass;
    }
  }
  return SecretSharingScheme{JointDistribution::renormalized(std::move(vars), std::move(mass), 1e-9),
                             {secret_var.name},
                             std::move(participants),
                             structure};
}

/// The three-participant 2-out-of-3 scheme built from three uniform pads
/// Y1, Y2, Y3 and a uniform secret bit S:
///   A = (Y1, Y2^S), B = (Y2, Y3^S), C = (Y3, Y1^S).
inline SecretSharingScheme construct_cyclic_example() {
  std::vector<VariableSpec> vars{{"S", 2}, {"A1", 2}, {"A2", 2}, {"B1", 2},
                                 {"B2", 2}, {"C1", 2}, {"C2", 2}};
  MassMap mass;
  for (int w = 0; w < 16; ++w) {
    const int y1 = w & 1, y2 = (w >> 1) & 1, y3 = (w >> 2) & 1, s = (w >> 3) & 1;
    mass[{s, y1, y2 ^ s, y2, y3 ^ s, y3, y1 ^ s}] += 1.0 / 16.0;
  }
  return SecretSharingScheme{JointDistribution(std::move(vars), std::move(mass)),
                             {"S"},
                             {{"A1", "A2"}, {"B1", "B2"}, {"C1", "C2"}},
                             AccessStructure(Antichain(3, {0b011, 0b101, 0b110}))};
}

struct SubsetViolation {
  Subset subset = 0;
  bool authorized = false;
  double value = 0.0;     // observed H(S | X_A)
  double expected = 0.0;  // 0 if authorized, H(S) otherwise
};

struct PerfectnessReport {
  bool perfect = true;
  std::vector<SubsetViolation> violations;
};

/// Checks H(S|X_A) = 0 for authorized A and H(S|X_A) = H(S) otherwise, over
/// all 2^n participant subsets.
inline PerfectnessReport check_perfect(const SecretSharingScheme& scheme, double tol = 1e-9) {
  detail::check_scheme_size(scheme.n());
  if (scheme.structure.n() != scheme.n()) {
    throw ArgumentError("access structure and participant list disagree on n");
  }
  PerfectnessReport report;
  const double hs = entropy(scheme.dist, scheme.secret);
  for (Subset a = 0; a <= full_set(scheme.n()); ++a) {
    const bool auth = scheme.structure.is_authorized(a);
    const double v = conditional_entropy(scheme.dist, scheme.secret, scheme.share(a));
    const double expected = auth ? 0.0 : hs;
    if (std::abs(v - expected) > tol) {
      report.perfect = false;
      report.violations.push_back({a, auth, v, expected});
    }
  }
  return report;
}

/// Independent product of schemes over the same participants. With two or
/// more schemes, scheme j's variables are renamed with the prefix "j:".
inline SchemeCombination combine(const std::vector<SecretSharingScheme>& schemes) {
  if (schemes.empty()) throw ArgumentError("cannot combine an empty list of schemes");
  const int n = schemes.front().n();
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    if (schemes[i].n() != n) throw ArgumentError("schemes have different participant counts");
    for (std::size_t j = 0; j < i; ++j) {
      if (schemes[i].structure == schemes[j].structure) {
        throw ArgumentError("duplicate access structure " + schemes[i].structure.minimal().text() +
                            "; merge the secrets of identical structures first");
      }
    }
  }
  SchemeCombination comb;
  comb.participants.assign(static_cast<std::size_t>(n), {});
  std::vector<JointDistribution> factors;
  const bool rename = schemes.size() > 1;
  for (std::size_t j = 0; j < schemes.size(); ++j) {
    const auto& sch = schemes[j];
    const std::string prefix = rename ? std::to_string(j + 1) + ":" : "";
    factors.push_back(rename ? with_prefix(sch.dist, prefix) : sch.dist);
    NameSet secret;
    for (const auto& s : sch.secret) secret.push_back(prefix + s);
    comb.secrets.push_back(std::move(secret));
    for (std::size_t i = 0; i < sch.participants.size(); ++i) {
      for (const auto& v : sch.participants[i]) comb.participants[i].push_back(prefix + v);
    }
    comb.structures.push_back(sch.structure);
  }
  comb.dist = FactoredDistribution(std::move(factors));
  return comb;
}

/// Which condition a combination failed.
enum class CombinationCheck {
  kDuplicateStructure,
  kNotPerfect,      // (S_i, X) is not a perfect scheme for A_i
  kLeaksGivenRest,  // H(S_i | other secrets, X_A) != H(S_i) for some A outside A_i
  kSecretsDependent
};

struct CombinationViolation {
  CombinationCheck check = CombinationCheck::kNotPerfect;
  std::size_t scheme = 0;
  Subset subset = 0;
  double value = 0.0;
  double expected = 0.0;
};

struct CombinationReport {
  bool valid = true;
  std::vector<CombinationViolation> violations;
};

inline CombinationReport check_combination(const SchemeCombination& comb, double tol = 1e-9) {
  detail::check_scheme_size(comb.n());
  if (comb.secrets.size() != comb.structures.size()) {
    throw ArgumentError("combination needs one access structure per secret");
  }
  CombinationReport report;
  auto fail = [&](CombinationCheck c, std::size_t i, Subset a, double v, double e) {
    report.valid = false;
    report.violations.push_back({c, i, a, v, e});
  };
  const std::size_t l = comb.secrets.size();
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (comb.structures[i] == comb.structures[j]) fail(CombinationCheck::kDuplicateStructure, i, 0, 0, 0);
    }
  }
  double sum_h = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    const auto& si = comb.secrets[i];
    const double hs = comb.dist.entropy(si);
    sum_h += hs;
    NameSet others;
    for (std::size_t j = 0; j < l; ++j) {
      if (j != i) others = detail::set_union(others, comb.secrets[j]);
    }
    for (Subset a = 0; a <= full_set(comb.n()); ++a) {
      const NameSet xa = comb.share(a);
      const bool auth = comb.structures[i].is_authorized(a);
      const double h = comb.dist.conditional_entropy(si, xa);
      const double expected = auth ? 0.0 : hs;
      if (std::abs(h - expected) > tol) fail(CombinationCheck::kNotPerfect, i, a, h, expected);
      if (!auth && l > 1) {
        const double hr = comb.dist.conditional_entropy(si, detail::set_union(others, xa));
        if (std::abs(hr - hs) > tol) fail(CombinationCheck::kLeaksGivenRest, i, a, hr, hs);
      }
    }
  }
  const double joint = comb.dist.entropy(comb.all_secrets());
  if (std::abs(joint - sum_h) > tol) fail(CombinationCheck::kSecretsDependent, 0, 0, joint, sum_h);
  return report;
}

/// A single-variable distribution with entropy h bits: alphabet k = ceil(2^h)
/// (at least 2), mass (p, (1-p)/(k-1), ...) with p found by bisection.
inline JointDistribution prescribe_entropy(double h, const std::string& name = "S") {
  if (!(h > 0.0)) throw ArgumentError("prescribed entropy must be positive");
  if (h > 20.0) throw CapacityError("prescribed entropy too large to tabulate");
  const int k = std::max(2, static_cast<int>(std::ceil(std::exp2(h) - 1e-12)));
  auto entropy_at = [k](double p) {
    const double q = (1.0 - p) / (k - 1);
    double e = 0.0;
    if (p > 0.0) e -= p * std::log2(p);
    if (q > 0.0) e -= (k - 1) * q * std::log2(q);
    return e;
  };
  double p;
  if (std::abs(std::log2(static_cast<double>(k)) - h) <= 1e-12) {
    p = 1.0 / k;
  } else {
    // Entropy decreases from log2(k) at p = 1/k to 0 at p = 1.
    double lo = 1.0 / k, hi = 1.0;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (entropy_at(mid) > h) lo = mid;
      else hi = mid;
    }
    p = 0.5 * (lo + hi);
  }
  MassMap mass;
  mass[{0}] = p;
  for (int i = 1; i < k; ++i) mass[{i}] = (1.0 - p) / (k - 1);
  return JointDistribution::renormalized({{name, k}}, std::move(mass), 1e-9);
}

/// One ISN scheme per antichain with positive value (secret entropy = value),
/// combined independently. Zero entries are skipped.
inline SchemeCombination prescribe_partials(int n, const std::map<Antichain, double>& values) {
  detail::check_scheme_size(n);
  std::vector<SecretSharingScheme> schemes;
  for (const auto& [node, h] : values) {
    if (node.n() != n) throw ArgumentError("antichain " + node.text() + " is not over n participants");
    if (!(h >= 0.0)) throw ArgumentError("prescribed value for " + node.text() + " is negative");
    if (h == 0.0) continue;
    schemes.push_back(construct_isn(AccessStructure(node), prescribe_entropy(h)));
  }
  if (schemes.empty()) {
    throw ArgumentError("all prescribed values are zero; an empty combination has no secret");
  }
  return combine(schemes);
}

/// H of the secrets S_i for which every set of `node` is authorized.
inline double reference_ssp_value(const SchemeCombination& comb, const Antichain& node) {
  if (node.n() != comb.n()) throw ArgumentError("node and combination disagree on n");
  NameSet known;
  for (std::size_t i = 0; i < comb.size(); ++i) {
    const auto& st = comb.structures[i];
    const bool all = std::all_of(node.sets().begin(), node.sets().end(),
                                 [&](Subset a) { return st.is_authorized(a); });
    if (all) known = detail::set_union(known, comb.secrets[i]);
  }
  return comb.dist.entropy(known);
}

/// Reads a joint distribution as a combination: each entry of `secrets` is
/// one secret, its access structure is the family of participant sets that
/// determine it. Throws PreconditionError unless the result is a valid
/// combination of perfect schemes.
inline SchemeCombination combination_from_distribution(const JointDistribution& dist,
                                                       const std::vector<NameSet>& secrets,
                                                       const std::vector<NameSet>& participants,
                                                       double tol = 1e-9) {
  const int n = static_cast<int>(participants.size());
  detail::check_scheme_size(n);
  if (secrets.empty()) throw ArgumentError("at least one secret is needed");
  SchemeCombination comb;
  comb.dist = FactoredDistribution(dist);
  comb.secrets = secrets;
  comb.participants = participants;
  for (const auto& s : secrets) {
    std::vector<Subset> family;
    for (Subset a = 1; a <= full_set(n); ++a) {
      if (conditional_entropy(dist, s, shares_of(participants, a)) <= tol) family.push_back(a);
    }
    if (family.empty()) {
      throw PreconditionError("secret '" + s.front() + "' is not determined by all participants together");
    }
    comb.structures.emplace_back(minimal_elements(n, family));
  }
  const auto report = check_combination(comb, tol);
  if (!report.valid) {
    throw PreconditionError("distribution is not a combination of perfect schemes (" +
                            std::to_string(report.violations.size()) + " violated conditions)");
  }
  return comb;
}

}  // namespace sspid
