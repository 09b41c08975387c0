#pragma once

// Finite joint distributions over named discrete variables and the Shannon
// quantities used everywhere else. All information values are in bits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sspid/errors.hpp"

namespace sspid {

/// Masses must sum to one within this tolerance.
inline constexpr double kNormalizationTol = 1e-9;
/// Probabilities below this are exact zeros inside entropy sums.
inline constexpr double kZeroProbability = 1e-12;
/// Information values in [-kInfoTol, 0) are rounding noise and clamp to 0.
inline constexpr double kInfoTol = 1e-9;

struct VariableSpec {
  std::string name;
  int cardinality = 1;

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

using Outcome = std::vector<int>;
using NameSet = std::vector<std::string>;
using MassMap = std::map<Outcome, double>;

/// Probability mass over full outcome tuples. Omitted tuples have mass 0; the
/// map keeps outcomes in lexicographic order so every sum below is evaluated in
/// the same order on every run.
class JointDistribution {
 public:
  JointDistribution() = default;

  JointDistribution(std::vector<VariableSpec> variables, MassMap mass)
      : variables_(std::move(variables)) {
    validate_variables();
    double total = 0.0;
    for (auto& [outcome, p] : mass) {
      validate_entry(outcome, p);
      total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
      throw ArgumentError("probabilities sum to " + std::to_string(total) + ", not 1");
    }
    for (auto& [outcome, p] : mass) {
      if (p > 0.0) mass_.emplace(outcome, p);
    }
  }

  /// Accepts masses whose total is within `tolerance` of one and rescales them
  /// when they miss the strict normalization tolerance. Masses already within
  /// kNormalizationTol are kept bit-for-bit.
  static JointDistribution renormalized(std::vector<VariableSpec> variables, MassMap mass,
                                        double tolerance) {
    double total = 0.0;
    for (const auto& [outcome, p] : mass) total += p;
    if (std::abs(total - 1.0) > tolerance) {
      throw ArgumentError("probabilities sum to " + std::to_string(total) +
                          ", outside the accepted tolerance");
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
      for (auto& [outcome, p] : mass) p /= total;
    }
    return JointDistribution(std::move(variables), std::move(mass));
  }

  /// Uniform mass over the full alphabet product.
  static JointDistribution uniform(std::vector<VariableSpec> variables) {
    std::size_t count = 1;
    for (const auto& v : variables) count *= static_cast<std::size_t>(std::max(v.cardinality, 1));
    MassMap mass;
    Outcome outcome(variables.size(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t rest = i;
      for (std::size_t k = variables.size(); k-- > 0;) {
        auto card = static_cast<std::size_t>(variables[k].cardinality);
        outcome[k] = static_cast<int>(rest % card);
        rest /= card;
      }
      mass[outcome] = 1.0 / static_cast<double>(count);
    }
    return JointDistribution(std::move(variables), std::move(mass));
  }

  const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
  const MassMap& mass() const noexcept { return mass_; }
  std::size_t support_size() const noexcept { return mass_.size(); }

  bool has(const std::string& name) const {
    return std::any_of(variables_.begin(), variables_.end(),
                       [&](const VariableSpec& v) { return v.name == name; });
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (variables_[i].name == name) return i;
    }
    throw NameError("unknown variable '" + name + "'");
  }

  double probability(const Outcome& outcome) const {
    auto it = mass_.find(outcome);
    return it == mass_.end() ? 0.0 : it->second;
  }

  NameSet names() const {
    NameSet out;
    out.reserve(variables_.size());
    for (const auto& v : variables_) out.push_back(v.name);
    return out;
  }

 private:
  void validate_variables() const {
    std::set<std::string> seen;
    for (const auto& v : variables_) {
      if (v.cardinality < 1) throw ArgumentError("variable '" + v.name + "' has cardinality < 1");
      if (!seen.insert(v.name).second) throw ArgumentError("duplicate variable '" + v.name + "'");
    }
  }

  void validate_entry(const Outcome& outcome, double p) const {
    if (!(p >= 0.0)) throw ArgumentError("negative or NaN probability");
    if (outcome.size() != variables_.size()) throw ArgumentError("outcome arity mismatch");
    for (std::size_t i = 0; i < outcome.size(); ++i) {
      if (outcome[i] < 0 || outcome[i] >= variables_[i].cardinality) {
        throw ArgumentError("outcome coordinate out of range for '" + variables_[i].name + "'");
      }
    }
  }

  std::vector<VariableSpec> variables_;
  MassMap mass_;
};

namespace detail {

inline std::vector<std::size_t> resolve(const JointDistribution& dist, const NameSet& names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& n : names) {
    auto i = dist.index_of(n);
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline MassMap project(const JointDistribution& dist, const std::vector<std::size_t>& idx) {
  MassMap out;
  Outcome key(idx.size());
  for (const auto& [outcome, p] : dist.mass()) {
    for (std::size_t k = 0; k < idx.size(); ++k) key[k] = outcome[idx[k]];
    out[key] += p;
  }
  return out;
}

inline double entropy_of_mass(const MassMap& mass) {
  double h = 0.0;
  for (const auto& [outcome, p] : mass) {
    if (p > kZeroProbability) h -= p * std::log2(p);
  }
  return h;
}

/// Entropy of the marginal on `idx`; the empty set has entropy 0.
inline double entropy_at(const JointDistribution& dist, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  return entropy_of_mass(project(dist, idx));
}

inline NameSet set_union(const NameSet& a, const NameSet& b) {
  NameSet out = a;
  for (const auto& n : b) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

inline bool intersects(const NameSet& a, const NameSet& b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string& n) {
    return std::find(b.begin(), b.end(), n) != b.end();
  });
}

inline void require_nonempty(const NameSet& s, const char* what) {
  if (s.empty()) throw ArgumentError(std::string(what) + " must be nonempty");
}

inline void require_disjoint(const NameSet& a, const NameSet& b) {
  if (intersects(a, b)) throw ArgumentError("variable sets must be disjoint");
}

/// Clamp rounding noise below zero; a larger negative value is a bug upstream.
inline double clamp_nonnegative(double v, const char* what) {
  if (v < -kInfoTol) {
    throw ConsistencyError(std::string(what) + " is negative beyond tolerance: " +
                           std::to_string(v));
  }
  return v < 0.0 ? 0.0 : v;
}

inline double entropy_raw(const JointDistribution& dist, const NameSet& vars) {
  return entropy_at(dist, resolve(dist, vars));
}

}  // namespace detail

inline JointDistribution marginalize(const JointDistribution& dist, const NameSet& keep) {
  detail::require_nonempty(keep, "kept variable set");
  auto idx = detail::resolve(dist, keep);
  std::vector<VariableSpec> vars;
  for (auto i : idx) vars.push_back(dist.variables()[i]);
  if (idx.size() == dist.variables().size()) return dist;
  return JointDistribution::renormalized(std::move(vars), detail::project(dist, idx),
                                         kNormalizationTol);
}

inline double entropy(const JointDistribution& dist, const NameSet& vars) {
  detail::require_nonempty(vars, "entropy variable set");
  return detail::entropy_raw(dist, vars);
}

inline double conditional_entropy(const JointDistribution& dist, const NameSet& target,
                                  const NameSet& given) {
  detail::require_nonempty(target, "target");
  detail::require_disjoint(target, given);
  double h = detail::entropy_raw(dist, detail::set_union(target, given)) -
             detail::entropy_raw(dist, given);
  return detail::clamp_nonnegative(h, "conditional entropy");
}

inline double mutual_information(const JointDistribution& dist, const NameSet& left,
                                 const NameSet& right) {
  detail::require_nonempty(left, "left");
  detail::require_nonempty(right, "right");
  detail::require_disjoint(left, right);
  double v = detail::entropy_raw(dist, left) + detail::entropy_raw(dist, right) -
             detail::entropy_raw(dist, detail::set_union(left, right));
  return detail::clamp_nonnegative(v, "mutual information");
}

inline double conditional_mutual_information(const JointDistribution& dist, const NameSet& left,
                                             const NameSet& right, const NameSet& given) {
  detail::require_nonempty(left, "left");
  detail::require_nonempty(right, "right");
  detail::require_disjoint(left, right);
  detail::require_disjoint(left, given);
  detail::require_disjoint(right, given);
  const auto lg = detail::set_union(left, given);
  const auto rg = detail::set_union(right, given);
  double v = detail::entropy_raw(dist, lg) + detail::entropy_raw(dist, rg) -
             detail::entropy_raw(dist, detail::set_union(lg, right)) -
             detail::entropy_raw(dist, given);
  return detail::clamp_nonnegative(v, "conditional mutual information");
}

/// I(s;x) - I(s;x|y). May be negative (synergy dominates).
inline double coinformation(const JointDistribution& dist, const NameSet& s, const NameSet& x,
                            const NameSet& y) {
  detail::require_nonempty(y, "third set");
  detail::require_disjoint(s, y);
  detail::require_disjoint(x, y);
  return mutual_information(dist, s, x) - conditional_mutual_information(dist, s, x, y);
}

inline bool is_function_of(const JointDistribution& dist, const NameSet& target,
                           const NameSet& given) {
  return conditional_entropy(dist, target, given) <= kInfoTol;
}

/// Independent product. Variable names must be disjoint across the inputs.
inline JointDistribution product(const std::vector<JointDistribution>& dists) {
  if (dists.empty()) throw ArgumentError("product of an empty list");
  if (dists.size() == 1) return dists.front();
  std::vector<VariableSpec> vars;
  std::set<std::string> seen;
  for (const auto& d : dists) {
    for (const auto& v : d.variables()) {
      if (!seen.insert(v.name).second) {
        throw ArgumentError("variable '" + v.name + "' appears in more than one factor");
      }
      vars.push_back(v);
    }
  }
  std::vector<std::pair<Outcome, double>> acc{{Outcome{}, 1.0}};
  for (const auto& d : dists) {
    std::vector<std::pair<Outcome, double>> next;
    next.reserve(acc.size() * d.support_size());
    for (const auto& [prefix, p] : acc) {
      for (const auto& [outcome, q] : d.mass()) {
        Outcome o = prefix;
        o.insert(o.end(), outcome.begin(), outcome.end());
        next.emplace_back(std::move(o), p * q);
      }
    }
    acc = std::move(next);
  }
  MassMap mass(acc.begin(), acc.end());
  return JointDistribution::renormalized(std::move(vars), std::move(mass), 1e-6);
}

/// Copy of `dist` with every variable name prefixed.
inline JointDistribution with_prefix(const JointDistribution& dist, const std::string& prefix) {
  auto vars = dist.variables();
  for (auto& v : vars) v.name = prefix + v.name;
  return JointDistribution(std::move(vars), dist.mass());
}

/// A joint distribution kept as a list of mutually independent factors.
/// Entropies of variable sets are sums of per-factor marginal entropies, so
/// products far too large to tabulate can still be measured exactly.
class FactoredDistribution {
 public:
  FactoredDistribution() = default;
  explicit FactoredDistribution(JointDistribution single) { factors_.push_back(std::move(single)); }
  explicit FactoredDistribution(std::vector<JointDistribution> factors)
      : factors_(std::move(factors)) {
    std::set<std::string> seen;
    for (const auto& f : factors_) {
      for (const auto& v : f.variables()) {
        if (!seen.insert(v.name).second) {
          throw ArgumentError("variable '" + v.name + "' appears in more than one factor");
        }
      }
    }
  }

  const std::vector<JointDistribution>& factors() const noexcept { return factors_; }

  bool has(const std::string& name) const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [&](const JointDistribution& f) { return f.has(name); });
  }

  /// Joint entropy of `vars` (empty set -> 0).
  double entropy(const NameSet& vars) const {
    std::vector<NameSet> per_factor(factors_.size());
    for (const auto& name : vars) {
      bool found = false;
      for (std::size_t k = 0; k < factors_.size() && !found; ++k) {
        if (factors_[k].has(name)) {
          per_factor[k].push_back(name);
          found = true;
        }
      }
      if (!found) throw NameError("unknown variable '" + name + "'");
    }
    double h = 0.0;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      if (!per_factor[k].empty()) h += detail::entropy_raw(factors_[k], per_factor[k]);
    }
    return h;
  }

  double conditional_entropy(const NameSet& target, const NameSet& given) const {
    detail::require_disjoint(target, given);
    return detail::clamp_nonnegative(entropy(detail::set_union(target, given)) - entropy(given),
                                     "conditional entropy");
  }

  double mutual_information(const NameSet& left, const NameSet& right) const {
    detail::require_disjoint(left, right);
    return detail::clamp_nonnegative(
        entropy(left) + entropy(right) - entropy(detail::set_union(left, right)),
        "mutual information");
  }

  /// Number of outcomes in the full product support.
  double support_size() const {
    double s = 1.0;
    for (const auto& f : factors_) s *= static_cast<double>(f.support_size());
    return s;
  }

  JointDistribution materialize(double max_support = 1 << 20) const {
    if (factors_.empty()) throw ArgumentError("empty factored distribution");
    if (support_size() > max_support) {
      throw CapacityError("product support of " + std::to_string(support_size()) +
                          " outcomes exceeds the materialization cap");
    }
    return product(factors_);
  }

 private:
  std::vector<JointDistribution> factors_;
};

}  // namespace sspid
