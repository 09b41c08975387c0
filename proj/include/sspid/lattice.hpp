#pragma once

// Antichains of participant subsets, the partial-information lattice they form,
// and Moebius inversion of node valuations.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sspid/errors.hpp"

namespace sspid {

/// Participant subset as a bitmask: bit i-1 is participant i.
using Subset = std::uint32_t;

/// Largest participant count for which the full lattice is built.
inline constexpr int kMaxLatticeParticipants = 5;
/// Text form uses one digit per participant.
inline constexpr int kMaxTextParticipants = 9;

inline bool is_subset(Subset a, Subset b) { return (a & ~b) == 0; }
inline int cardinality(Subset s) { return std::popcount(s); }
inline Subset full_set(int n) { return n >= 32 ? ~Subset{0} : (Subset{1} << n) - 1; }

inline std::string subset_digits(Subset s) {
  std::string out;
  for (int i = 0; i < 32; ++i) {
    if (s & (Subset{1} << i)) out += std::to_string(i + 1);
  }
  return out;
}

inline Subset subset_from_participants(const std::vector<int>& members, int n) {
  Subset s = 0;
  for (int m : members) {
    if (m < 1 || m > n) {
      throw ArgumentError("participant " + std::to_string(m) + " outside 1.." + std::to_string(n));
    }
    s |= Subset{1} << (m - 1);
  }
  return s;
}

/// A nonempty family of pairwise incomparable nonempty subsets of {1..n},
/// stored sorted by bitmask (the canonical form).
class Antichain {
 public:
  Antichain() = default;

  Antichain(int n, std::vector<Subset> sets) : n_(n), sets_(std::move(sets)) {
    if (n_ < 1 || n_ > kMaxTextParticipants) {
      throw ArgumentError("participant count must be in 1.." + std::to_string(kMaxTextParticipants));
    }
    if (sets_.empty()) throw ArgumentError("antichain must be nonempty");
    std::sort(sets_.begin(), sets_.end());
    sets_.erase(std::unique(sets_.begin(), sets_.end()), sets_.end());
    for (Subset s : sets_) {
      if (s == 0) throw ArgumentError("antichain contains the empty set");
      if (!is_subset(s, full_set(n_))) throw ArgumentError("subset outside {1..n}");
    }
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      for (std::size_t j = i + 1; j < sets_.size(); ++j) {
        if (is_subset(sets_[i], sets_[j]) || is_subset(sets_[j], sets_[i])) {
          throw ArgumentError("sets {" + subset_digits(sets_[i]) + "} and {" +
                              subset_digits(sets_[j]) + "} are comparable");
        }
      }
    }
  }

  int n() const noexcept { return n_; }
  const std::vector<Subset>& sets() const noexcept { return sets_; }
  std::size_t size() const noexcept { return sets_.size(); }

  /// Up-closure as a bitmask over the 2^n subsets (bit T set iff T is a
  /// superset of some member). Only defined for n <= 5.
  std::uint32_t up_mask() const {
    if (n_ > kMaxLatticeParticipants) throw CapacityError("up-set mask needs n <= 5");
    std::uint32_t mask = 0;
    for (Subset t = 1; t <= full_set(n_); ++t) {
      for (Subset s : sets_) {
        if (is_subset(s, t)) {
          mask |= std::uint32_t{1} << t;
          break;
        }
      }
    }
    return mask;
  }

  /// Text form, e.g. `{1}{23}`. Sets are listed by size, then digit order,
  /// which is how node labels are usually written (`{3}{12}`).
  std::string text() const {
    std::vector<std::string> parts;
    for (Subset s : sets_) parts.push_back(subset_digits(s));
    std::sort(parts.begin(), parts.end(), [](const std::string& a, const std::string& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    std::string out;
    for (const auto& p : parts) out += "{" + p + "}";
    return out;
  }

  static Antichain parse(std::string_view text, int n) {
    std::vector<Subset> sets;
    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    skip_ws();
    while (i < text.size()) {
      if (text[i] != '{') throw ParseError("expected '{' in antichain '" + std::string(text) + "'");
      ++i;
      Subset s = 0;
      while (i < text.size() && text[i] != '}') {
        char c = text[i];
        if (c == ',' || c == ' ') {
          ++i;
          continue;
        }
        if (c < '1' || c > '9' || c - '0' > n) {
          throw ParseError("invalid participant '" + std::string(1, c) + "' in antichain '" +
                           std::string(text) + "'");
        }
        Subset bit = Subset{1} << (c - '1');
        if (s & bit) throw ParseError("repeated participant in antichain '" + std::string(text) + "'");
        s |= bit;
        ++i;
      }
      if (i == text.size()) throw ParseError("unterminated set in antichain '" + std::string(text) + "'");
      ++i;
      if (s == 0) throw ParseError("empty set in antichain '" + std::string(text) + "'");
      sets.push_back(s);
      skip_ws();
    }
    if (sets.empty()) throw ParseError("empty antichain text");
    try {
      return Antichain(n, std::move(sets));
    } catch (const ArgumentError& e) {
      throw ParseError(std::string("'") + std::string(text) + "' is not an antichain: " + e.what());
    }
  }

  friend bool operator==(const Antichain&, const Antichain&) = default;
  friend auto operator<=>(const Antichain&, const Antichain&) = default;

 private:
  int n_ = 0;
  std::vector<Subset> sets_;
};

/// a <= b iff every set of b contains some set of a.
inline bool leq(const Antichain& a, const Antichain& b) {
  if (a.n() != b.n()) throw ArgumentError("antichains over different participant counts");
  return std::all_of(b.sets().begin(), b.sets().end(), [&](Subset bs) {
    return std::any_of(a.sets().begin(), a.sets().end(),
                       [&](Subset as) { return is_subset(as, bs); });
  });
}

/// Inclusion-minimal members of a family of subsets of {1..n}.
inline Antichain minimal_elements(int n, const std::vector<Subset>& family) {
  if (family.empty()) throw ArgumentError("minimal_elements of an empty family");
  std::vector<Subset> out;
  for (Subset s : family) {
    bool minimal = std::none_of(family.begin(), family.end(),
                                [&](Subset t) { return t != s && is_subset(t, s); });
    if (minimal) out.push_back(s);
  }
  return Antichain(n, std::move(out));
}

/// Node values of a valuation, indexed like PILattice::nodes().
struct LatticeValuation {
  std::vector<double> cumulative;
  std::vector<double> partial;
};

/// All antichains on {1..n} ordered bottom-up: node indices form a linear
/// extension of the lattice order, so i precedes j whenever node i < node j.
class PILattice {
 public:
  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<Antichain>& nodes() const noexcept { return nodes_; }
  const Antichain& node(std::size_t i) const { return nodes_.at(i); }
  const Antichain& bottom() const { return nodes_.front(); }
  const Antichain& top() const { return nodes_.back(); }

  bool contains(const Antichain& a) const { return index_.count(a) != 0; }

  std::size_t index_of(const Antichain& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) throw ArgumentError("antichain " + a.text() + " is not a lattice node");
    return it->second;
  }

  /// Order relation between node indices.
  bool leq(std::size_t i, std::size_t j) const {
    if (!dense_.empty()) return dense_[i * nodes_.size() + j] != 0;
    return (up_[j] & ~up_[i]) == 0;
  }

  /// Pairs (lower, upper) where upper covers lower. Covers of up-set lattices
  /// add exactly one subset, so each is found by a single-subset extension.
  std::vector<std::pair<std::size_t, std::size_t>> cover_edges() const {
    std::map<std::uint32_t, std::size_t> by_up;
    for (std::size_t i = 0; i < up_.size(); ++i) by_up.emplace(up_[i], i);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    const Subset full = full_set(n_);
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      const std::uint32_t up = up_[j];
      for (Subset t = 1; t <= full; ++t) {
        if (up & (std::uint32_t{1} << t)) continue;
        bool closed = true;
        for (int p = 0; p < n_ && closed; ++p) {
          Subset bit = Subset{1} << p;
          if (!(t & bit) && !(up & (std::uint32_t{1} << (t | bit)))) closed = false;
        }
        if (!closed) continue;
        edges.emplace_back(by_up.at(up | (std::uint32_t{1} << t)), j);
      }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
  }

 private:
  friend PILattice enumerate_antichains(int n);

  int n_ = 0;
  std::vector<Antichain> nodes_;
  std::vector<std::uint32_t> up_;
  std::vector<char> dense_;
  std::map<Antichain, std::size_t> index_;
};

inline PILattice enumerate_antichains(int n) {
  if (n < 1 || n > kMaxLatticeParticipants) {
    throw CapacityError("lattice size n=" + std::to_string(n) + " outside 1..5");
  }
  std::vector<Subset> order;
  for (Subset s = 1; s <= full_set(n); ++s) order.push_back(s);
  std::stable_sort(order.begin(), order.end(),
                   [](Subset a, Subset b) { return cardinality(a) > cardinality(b); });

  std::vector<Antichain> found;
  std::vector<Subset> chosen;
  auto extend = [&](auto&& self, std::size_t start) -> void {
    if (!chosen.empty()) found.emplace_back(n, chosen);
    for (std::size_t i = start; i < order.size(); ++i) {
      Subset s = order[i];
      bool free = std::none_of(chosen.begin(), chosen.end(),
                               [&](Subset c) { return is_subset(c, s) || is_subset(s, c); });
      if (!free) continue;
      chosen.push_back(s);
      self(self, i + 1);
      chosen.pop_back();
    }
  };
  extend(extend, 0);

  std::vector<std::pair<std::uint32_t, Antichain>> keyed;
  keyed.reserve(found.size());
  for (auto& a : found) keyed.emplace_back(a.up_mask(), std::move(a));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    int ca = std::popcount(a.first), cb = std::popcount(b.first);
    if (ca != cb) return ca > cb;
    return a.second < b.second;
  });

  PILattice lat;
  lat.n_ = n;
  for (auto& [up, a] : keyed) {
    lat.index_.emplace(a, lat.nodes_.size());
    lat.up_.push_back(up);
    lat.nodes_.push_back(std::move(a));
  }
  if (n <= 4) {
    const std::size_t m = lat.nodes_.size();
    lat.dense_.assign(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        lat.dense_[i * m + j] = (lat.up_[j] & ~lat.up_[i]) == 0 ? 1 : 0;
      }
    }
  }
  return lat;
}

/// Nodes below `node` (inclusive), in lattice order.
inline std::vector<Antichain> down_set(const PILattice& lattice, const Antichain& node) {
  const std::size_t j = lattice.index_of(node);
  std::vector<Antichain> out;
  for (std::size_t i = 0; i <= j; ++i) {
    if (lattice.leq(i, j)) out.push_back(lattice.node(i));
  }
  return out;
}

/// Sum of partial terms over each node's down-set.
inline std::vector<double> cumulate(const PILattice& lattice, std::span<const double> partial) {
  if (partial.size() != lattice.size()) throw ArgumentError("valuation size does not match lattice");
  std::vector<double> out(lattice.size(), 0.0);
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i <= j; ++i) {
      if (lattice.leq(i, j)) sum += partial[i];
    }
    out[j] = sum;
  }
  return out;
}

/// Partial terms by recursive subtraction in lattice order. NaN cumulative
/// values propagate to every node above them.
inline LatticeValuation moebius_invert(const PILattice& lattice, std::span<const double> cumulative) {
  if (cumulative.size() != lattice.size()) {
    throw ArgumentError("valuation has " + std::to_string(cumulative.size()) + " values for " +
                        std::to_string(lattice.size()) + " nodes");
  }
  LatticeValuation v;
  v.cumulative.assign(cumulative.begin(), cumulative.end());
  v.partial.assign(lattice.size(), 0.0);
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    double below = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      if (lattice.leq(i, j)) below += v.partial[i];
    }
    v.partial[j] = v.cumulative[j] - below;
  }
  return v;
}

inline LatticeValuation moebius_invert(const PILattice& lattice,
                                       const std::map<Antichain, double>& cumulative) {
  std::vector<double> values(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    auto it = cumulative.find(lattice.node(i));
    if (it == cumulative.end()) {
      throw ArgumentError("no value for node " + lattice.node(i).text());
    }
    values[i] = it->second;
  }
  return moebius_invert(lattice, values);
}

/// Pairs (a, b) with a strictly below b but cumulative(a) > cumulative(b) + tol.
/// NaN entries are skipped.
inline std::vector<std::pair<std::size_t, std::size_t>> check_monotone(
    const PILattice& lattice, std::span<const double> cumulative, double tol = 1e-9) {
  if (cumulative.size() != lattice.size()) throw ArgumentError("valuation size does not match lattice");
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    if (std::isnan(cumulative[j])) continue;
    for (std::size_t i = 0; i < j; ++i) {
      if (std::isnan(cumulative[i])) continue;
      if (lattice.leq(i, j) && cumulative[i] > cumulative[j] + tol) bad.emplace_back(i, j);
    }
  }
  return bad;
}

}  // namespace sspid
