#pragma once

// Bivariate shared information SI~(s; x, y): maximize H_Q(s | x, y) over the
// joint distributions Q that keep the (s,x) and (s,y) marginals of P, then
// read the co-information I_Q(s;x) - I_Q(s;x|y) at the maximizer.
//
// For each value of s the feasible set is a transportation polytope with row
// sums P(s,x) and column sums P(s,y); the polytopes for different s are
// coupled only through the objective.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sspid/errors.hpp"
#include "sspid/prob.hpp"

namespace sspid {

struct BivariateInstance {
  JointDistribution dist;
  NameSet s;
  NameSet x;
  NameSet y;
};

/// A point of the marginal polytope, over the instance's s, x, y variables
/// (in that order).
struct DeltaPPoint {
  JointDistribution q;
};

struct SolverOptions {
  double tol = 1e-6;
  int max_iterations = 10000;
};

/// Builds an instance from possibly overlapping name sets: any variable used
/// by more than one of s, x, y is duplicated under a fresh name so the three
/// sets become disjoint. Variables outside s, x, y are marginalized out.
inline BivariateInstance make_bivariate(const JointDistribution& dist, const NameSet& s,
                                        const NameSet& x, const NameSet& y) {
  detail::require_nonempty(s, "s");
  detail::require_nonempty(x, "x");
  detail::require_nonempty(y, "y");
  const auto base = marginalize(dist, detail::set_union(detail::set_union(s, x), y));
  std::vector<VariableSpec> vars = base.variables();
  std::vector<std::size_t> source;  // for each copy, the base column it duplicates
  auto fresh = [&](const std::string& name, const std::string& tag) {
    std::string candidate = name + "#" + tag;
    while (base.has(candidate) ||
           std::any_of(vars.begin(), vars.end(), [&](const VariableSpec& v) { return v.name == candidate; })) {
      candidate += "'";
    }
    return candidate;
  };
  auto disjoint_copy = [&](const NameSet& names, const NameSet& taken, const std::string& tag) {
    NameSet out;
    for (const auto& n : names) {
      if (std::find(taken.begin(), taken.end(), n) == taken.end()) {
        out.push_back(n);
        continue;
      }
      const auto col = base.index_of(n);
      auto copy = base.variables()[col];
      copy.name = fresh(n, tag);
      vars.push_back(copy);
      source.push_back(col);
      out.push_back(copy.name);
    }
    return out;
  };
  const NameSet xs = disjoint_copy(x, s, "x");
  const NameSet ys = disjoint_copy(y, detail::set_union(s, x), "y");
  if (source.empty()) return BivariateInstance{base, s, x, y};
  MassMap mass;
  for (const auto& [outcome, p] : base.mass()) {
    Outcome o = outcome;
    for (auto col : source) o.push_back(outcome[col]);
    mass.emplace(std::move(o), p);
  }
  return BivariateInstance{JointDistribution(std::move(vars), std::move(mass)), s, xs, ys};
}

namespace detail {

/// Dense (s, x, y) table of an instance over the values present in its support.
struct FlatInstance {
  std::vector<VariableSpec> vars;  // s..., x..., y...
  std::vector<Outcome> s_values, x_values, y_values;
  std::size_t ns = 0, nx = 0, ny = 0;
  std::vector<double> p;    // p[(s*nx + x)*ny + y]
  std::vector<double> psx;  // psx[s*nx + x]
  std::vector<double> psy;  // psy[s*ny + y]
  std::vector<double> ps;
  std::vector<char> free;   // coordinate may be nonzero in the polytope

  std::size_t at(std::size_t s, std::size_t x, std::size_t y) const { return (s * nx + x) * ny + y; }
};

inline FlatInstance flatten(const BivariateInstance& inst) {
  require_nonempty(inst.s, "s");
  require_nonempty(inst.x, "x");
  require_nonempty(inst.y, "y");
  require_disjoint(inst.s, inst.x);
  require_disjoint(inst.s, inst.y);
  require_disjoint(inst.x, inst.y);
  FlatInstance f;
  auto cols = [&](const NameSet& names) {
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
      idx.push_back(inst.dist.index_of(n));
      f.vars.push_back(inst.dist.variables()[idx.back()]);
    }
    return idx;
  };
  const auto sc = cols(inst.s), xc = cols(inst.x), yc = cols(inst.y);
  auto pick = [](const Outcome& o, const std::vector<std::size_t>& c) {
    Outcome out;
    for (auto i : c) out.push_back(o[i]);
    return out;
  };
  std::map<Outcome, std::size_t> si, xi, yi;
  for (const auto& [o, p] : inst.dist.mass()) {
    si.emplace(pick(o, sc), 0);
    xi.emplace(pick(o, xc), 0);
    yi.emplace(pick(o, yc), 0);
  }
  for (auto* m : {&si, &xi, &yi}) {
    std::size_t k = 0;
    for (auto& [key, idx] : *m) idx = k++;
  }
  for (const auto& [key, idx] : si) f.s_values.push_back(key);
  for (const auto& [key, idx] : xi) f.x_values.push_back(key);
  for (const auto& [key, idx] : yi) f.y_values.push_back(key);
  f.ns = si.size();
  f.nx = xi.size();
  f.ny = yi.size();
  f.p.assign(f.ns * f.nx * f.ny, 0.0);
  for (const auto& [o, p] : inst.dist.mass()) {
    f.p[f.at(si[pick(o, sc)], xi[pick(o, xc)], yi[pick(o, yc)])] += p;
  }
  f.psx.assign(f.ns * f.nx, 0.0);
  f.psy.assign(f.ns * f.ny, 0.0);
  f.ps.assign(f.ns, 0.0);
  for (std::size_t s = 0; s < f.ns; ++s) {
    for (std::size_t x = 0; x < f.nx; ++x) {
      for (std::size_t y = 0; y < f.ny; ++y) {
        const double v = f.p[f.at(s, x, y)];
        f.psx[s * f.nx + x] += v;
        f.psy[s * f.ny + y] += v;
        f.ps[s] += v;
      }
    }
  }
  f.free.assign(f.p.size(), 0);
  for (std::size_t s = 0; s < f.ns; ++s) {
    for (std::size_t x = 0; x < f.nx; ++x) {
      for (std::size_t y = 0; y < f.ny; ++y) {
        f.free[f.at(s, x, y)] = f.psx[s * f.nx + x] > 0.0 && f.psy[s * f.ny + y] > 0.0;
      }
    }
  }
  return f;
}

inline std::vector<double> qstar_table(const FlatInstance& f) {
  std::vector<double> q(f.p.size(), 0.0);
  for (std::size_t s = 0; s < f.ns; ++s) {
    if (f.ps[s] <= 0.0) continue;
    for (std::size_t x = 0; x < f.nx; ++x) {
      for (std::size_t y = 0; y < f.ny; ++y) {
        q[f.at(s, x, y)] = f.psx[s * f.nx + x] * f.psy[s * f.ny + y] / f.ps[s];
      }
    }
  }
  return q;
}

/// H_Q(S | X, Y) in nats.
inline double cond_entropy_nats(const FlatInstance& f, const std::vector<double>& q) {
  double h = 0.0;
  for (std::size_t x = 0; x < f.nx; ++x) {
    for (std::size_t y = 0; y < f.ny; ++y) {
      double qxy = 0.0;
      for (std::size_t s = 0; s < f.ns; ++s) {
        const double v = q[f.at(s, x, y)];
        if (v > 0.0) {
          h -= v * std::log(v);
          qxy += v;
        }
      }
      if (qxy > 0.0) h += qxy * std::log(qxy);
    }
  }
  return h;
}

inline DeltaPPoint to_point(const FlatInstance& f, const std::vector<double>& q) {
  MassMap mass;
  double total = 0.0;
  for (std::size_t s = 0; s < f.ns; ++s) {
    for (std::size_t x = 0; x < f.nx; ++x) {
      for (std::size_t y = 0; y < f.ny; ++y) {
        const double v = q[f.at(s, x, y)];
        if (v <= 0.0) continue;
        Outcome o = f.s_values[s];
        o.insert(o.end(), f.x_values[x].begin(), f.x_values[x].end());
        o.insert(o.end(), f.y_values[y].begin(), f.y_values[y].end());
        mass.emplace(std::move(o), v);
        total += v;
      }
    }
  }
  for (auto& [o, v] : mass) v /= total;
  return DeltaPPoint{JointDistribution::renormalized(f.vars, std::move(mass), 1e-6)};
}

/// q-weighted projection of `g` onto the directions that keep every row and
/// column sum of every s-block fixed, by alternating removal of weighted row
/// and column means. Returns d = q * (g - a - b).
inline std::vector<double> scaled_tangent_direction(const FlatInstance& f, const std::vector<double>& q,
                                                    const std::vector<double>& g) {
  std::vector<double> d(q.size(), 0.0);
  std::vector<double> a(f.nx), b(f.ny);
  for (std::size_t s = 0; s < f.ns; ++s) {
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(b.begin(), b.end(), 0.0);
    for (int sweep = 0; sweep < 2000; ++sweep) {
      double change = 0.0;
      for (std::size_t x = 0; x < f.nx; ++x) {
        double num = 0.0, den = 0.0;
        for (std::size_t y = 0; y < f.ny; ++y) {
          const double w = q[f.at(s, x, y)];
          num += w * (g[f.at(s, x, y)] - b[y]);
          den += w;
        }
        if (den > 0.0) {
          const double na = num / den;
          change = std::max(change, std::abs(na - a[x]));
          a[x] = na;
        }
      }
      for (std::size_t y = 0; y < f.ny; ++y) {
        double num = 0.0, den = 0.0;
        for (std::size_t x = 0; x < f.nx; ++x) {
          const double w = q[f.at(s, x, y)];
          num += w * (g[f.at(s, x, y)] - a[x]);
          den += w;
        }
        if (den > 0.0) {
          const double nb = num / den;
          change = std::max(change, std::abs(nb - b[y]));
          b[y] = nb;
        }
      }
      if (change < 1e-15) break;
    }
    for (std::size_t x = 0; x < f.nx; ++x) {
      for (std::size_t y = 0; y < f.ny; ++y) {
        const auto i = f.at(s, x, y);
        if (f.free[i]) d[i] = q[i] * (g[i] - a[x] - b[y]);
      }
    }
  }
  return d;
}

/// Maximizes H_Q(S|X,Y) (nats) by variable-metric projected ascent started at
/// the conditional-independence coupling. Only improving steps are accepted.
inline std::vector<double> maximize_conditional_entropy(const FlatInstance& f, const SolverOptions& opt) {
  std::vector<double> q = qstar_table(f);
  double value = cond_entropy_nats(f, q);
  std::vector<double> g(q.size(), 0.0), trial(q.size(), 0.0);
  double step = 1.0;
  const double stop = std::min(1e-14, opt.tol * opt.tol);
  double slope = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iterations; ++it) {
    // Gradient of H(S|X,Y): -log Q(s|x,y).
    for (std::size_t x = 0; x < f.nx; ++x) {
      for (std::size_t y = 0; y < f.ny; ++y) {
        double qxy = 0.0;
        for (std::size_t s = 0; s < f.ns; ++s) qxy += q[f.at(s, x, y)];
        for (std::size_t s = 0; s < f.ns; ++s) {
          const auto i = f.at(s, x, y);
          g[i] = (f.free[i] && q[i] > 0.0) ? std::log(qxy) - std::log(q[i]) : 0.0;
        }
      }
    }
    const auto d = scaled_tangent_direction(f, q, g);
    slope = 0.0;
    double max_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.size(); ++i) {
      slope += g[i] * d[i];
      if (d[i] < 0.0) max_step = std::min(max_step, -q[i] / d[i]);
    }
    if (slope <= stop) return q;
    step = std::min(2.0 * step, 0.9 * max_step);
    bool moved = false;
    while (step > 1e-18) {
      for (std::size_t i = 0; i < q.size(); ++i) trial[i] = f.free[i] ? q[i] + step * d[i] : 0.0;
      const double tv = cond_entropy_nats(f, trial);
      if (tv >= value + 1e-4 * step * slope) {
        if (tv > value) {
          q.swap(trial);
          value = tv;
          moved = true;
        }
        break;
      }
      step *= 0.5;
    }
    // No representable improvement left along the ascent direction.
    if (!moved) return q;
  }
  if (slope > opt.tol) {
    throw ConvergenceError("marginal-polytope ascent did not converge", value / std::log(2.0));
  }
  return q;
}

inline double residual(const FlatInstance& f, const std::vector<double>& q) {
  double worst = 0.0;
  for (std::size_t s = 0; s < f.ns; ++s) {
    for (std::size_t x = 0; x < f.nx; ++x) {
      double sum = 0.0;
      for (std::size_t y = 0; y < f.ny; ++y) sum += q[f.at(s, x, y)];
      worst = std::max(worst, std::abs(sum - f.psx[s * f.nx + x]));
    }
    for (std::size_t y = 0; y < f.ny; ++y) {
      double sum = 0.0;
      for (std::size_t x = 0; x < f.nx; ++x) sum += q[f.at(s, x, y)];
      worst = std::max(worst, std::abs(sum - f.psy[s * f.ny + y]));
    }
  }
  return worst;
}

}  // namespace detail

/// Maximizer of H_Q(s|x,y) over the marginal polytope.
inline DeltaPPoint optimize_delta_p(const BivariateInstance& inst, const SolverOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw ArgumentError("tolerance must be positive");
  const auto f = detail::flatten(inst);
  return detail::to_point(f, detail::maximize_conditional_entropy(f, opt));
}

/// Q*(s,x,y) = P(s) P(x|s) P(y|s).
inline DeltaPPoint qstar_product(const BivariateInstance& inst) {
  const auto f = detail::flatten(inst);
  return detail::to_point(f, detail::qstar_table(f));
}

/// Largest deviation of the point's (s,x) and (s,y) marginals from P's.
inline double marginal_residual(const BivariateInstance& inst, const DeltaPPoint& point) {
  const NameSet sx = detail::set_union(inst.s, inst.x);
  const NameSet sy = detail::set_union(inst.s, inst.y);
  double worst = 0.0;
  auto ordered = [](const JointDistribution& d, const NameSet& names) {
    std::vector<std::size_t> idx;
    for (const auto& n : names) idx.push_back(d.index_of(n));
    return detail::project(d, idx);
  };
  for (const auto* names : {&sx, &sy}) {
    const auto pm = ordered(inst.dist, *names);
    const auto qm = ordered(point.q, *names);
    for (const auto& [o, v] : pm) {
      auto it = qm.find(o);
      worst = std::max(worst, std::abs(v - (it == qm.end() ? 0.0 : it->second)));
    }
    for (const auto& [o, v] : qm) {
      if (!pm.count(o)) worst = std::max(worst, v);
    }
  }
  return worst;
}

/// I_Q(s;x) - I_Q(s;x|y) at a given point.
inline double coinformation_at(const BivariateInstance& inst, const DeltaPPoint& point) {
  return mutual_information(point.q, inst.s, inst.x) -
         conditional_mutual_information(point.q, inst.s, inst.x, inst.y);
}

inline double si_tilde(const BivariateInstance& inst, const SolverOptions& opt = {}) {
  const auto point = optimize_delta_p(inst, opt);
  const double v = coinformation_at(inst, point);
  return std::abs(v) <= opt.tol ? 0.0 : v;
}

/// Exhaustive grid search over the product of the per-s transportation
/// polytopes (free coordinates: the leading (rows-1) x (cols-1) block of each
/// s-slice), followed by pattern-search refinement. Independent of the
/// gradient solver; intended for tiny instances only.
inline double oracle_si_tilde(const BivariateInstance& inst, int grid) {
  if (grid < 2) throw ArgumentError("oracle grid needs at least 2 points per coordinate");
  const auto f = detail::flatten(inst);

  struct Coord {
    std::size_t s, x, y;
    double hi;
  };
  struct Block {
    std::size_t s;
    std::vector<std::size_t> rows, cols;
  };
  std::vector<Block> blocks;
  std::vector<Coord> coords;
  for (std::size_t s = 0; s < f.ns; ++s) {
    Block b{s, {}, {}};
    for (std::size_t x = 0; x < f.nx; ++x) {
      if (f.psx[s * f.nx + x] > 0.0) b.rows.push_back(x);
    }
    for (std::size_t y = 0; y < f.ny; ++y) {
      if (f.psy[s * f.ny + y] > 0.0) b.cols.push_back(y);
    }
    if (b.rows.empty()) continue;
    const std::size_t dim = (b.rows.size() - 1) * (b.cols.size() - 1);
    if (dim > 4) throw CapacityError("oracle: per-s polytope dimension exceeds 4");
    for (std::size_t i = 0; i + 1 < b.rows.size(); ++i) {
      for (std::size_t j = 0; j + 1 < b.cols.size(); ++j) {
        coords.push_back({s, b.rows[i], b.cols[j],
                          std::min(f.psx[s * f.nx + b.rows[i]], f.psy[s * f.ny + b.cols[j]])});
      }
    }
    blocks.push_back(std::move(b));
  }
  if (coords.size() > 4) throw CapacityError("oracle: total polytope dimension exceeds 4");
  if (std::pow(static_cast<double>(grid), static_cast<double>(coords.size())) > 2e7) {
    throw CapacityError("oracle: grid too fine for this dimension");
  }

  std::vector<double> q(f.p.size(), 0.0);
  // Fill the dependent last row/column of each block; false if infeasible.
  auto complete = [&](const std::vector<double>& values) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t c = 0; c < coords.size(); ++c) q[f.at(coords[c].s, coords[c].x, coords[c].y)] = values[c];
    for (const auto& b : blocks) {
      const std::size_t lr = b.rows.back(), lc = b.cols.back();
      for (std::size_t i = 0; i + 1 < b.rows.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j + 1 < b.cols.size(); ++j) sum += q[f.at(b.s, b.rows[i], b.cols[j])];
        q[f.at(b.s, b.rows[i], lc)] = f.psx[b.s * f.nx + b.rows[i]] - sum;
      }
      for (std::size_t j = 0; j < b.cols.size(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < b.rows.size(); ++i) sum += q[f.at(b.s, b.rows[i], b.cols[j])];
        q[f.at(b.s, lr, b.cols[j])] = f.psy[b.s * f.ny + b.cols[j]] - sum;
      }
    }
    for (auto& v : q) {
      if (v < -1e-13) return false;
      if (v < 0.0) v = 0.0;
    }
    return true;
  };

  const std::size_t dim = coords.size();
  std::vector<double> values(dim, 0.0), best_values(dim, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> odometer(dim, 0);
  while (true) {
    for (std::size_t c = 0; c < dim; ++c) values[c] = coords[c].hi * odometer[c] / (grid - 1);
    if (complete(values)) {
      const double h = detail::cond_entropy_nats(f, q);
      if (h > best) {
        best = h;
        best_values = values;
      }
    }
    std::size_t c = 0;
    while (c < dim && ++odometer[c] == grid) odometer[c++] = 0;
    if (c == dim) break;
  }
  if (!std::isfinite(best)) throw ConsistencyError("oracle found no feasible grid point");

  std::vector<double> h(dim);
  for (std::size_t c = 0; c < dim; ++c) h[c] = coords[c].hi / (grid - 1);
  while (dim > 0 && *std::max_element(h.begin(), h.end()) > 1e-13) {
    bool improved = false;
    for (std::size_t c = 0; c < dim; ++c) {
      for (double dir : {1.0, -1.0}) {
        values = best_values;
        values[c] = std::clamp(values[c] + dir * h[c], 0.0, coords[c].hi);
        if (!complete(values)) continue;
        const double v = detail::cond_entropy_nats(f, q);
        if (v > best) {
          best = v;
          best_values = values;
          improved = true;
        }
      }
    }
    if (!improved) {
      for (auto& step : h) step *= 0.5;
    }
  }

  // SI = I(s;x) - I_Q(s;x|y) with I_Q(s;x|y) = H_P(s|y) - H_Q(s|x,y); the
  // (s,x) and (s,y) marginals are the same under every feasible Q.
  const double max_h_bits = best / std::log(2.0);
  return mutual_information(inst.dist, inst.s, inst.x) - conditional_entropy(inst.dist, inst.s, inst.y) +
         max_h_bits;
}

}  // namespace sspid
