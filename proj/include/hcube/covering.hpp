#pragma once

// delta-coverings by cylinders. Every covering produced here is a union of
// lattice groups: one isometry f, one base box B in f's source frame, and a
// rectangular lattice of translates B + sum_j k_j step_j e_{axis_j}. Cell
// (k_1..k_r) is the cylinder f(B + offset(k)). Cells listed in a group's
// exclusion boxes are dropped because an earlier group already covers them.
//
// Three constructions are provided:
//   grid_covering            the uniform m^n grid of I^omega,
//   efficient_covering       translates of a small corner cylinder J* of J,
//   cover_image_union        refine each member of a union, then map by f,
// and restricted_grid_covering, the grid cells meeting a union.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hcube/cylinder.hpp"
#include "hcube/errors.hpp"
#include "hcube/isometry.hpp"
#include "hcube/quasi_random.hpp"
#include "hcube/weighted_space.hpp"

namespace hcube {

/// Inclusive index range [first, last] per lattice axis.
struct IndexBox {
  std::vector<std::size_t> first;
  std::vector<std::size_t> last;

  bool contains(std::span<const std::size_t> k) const {
    for (std::size_t a = 0; a < first.size(); ++a)
      if (k[a] < first[a] || k[a] > last[a]) return false;
    return true;
  }
  double size() const {
    double n = 1.0;
    for (std::size_t a = 0; a < first.size(); ++a) n *= static_cast<double>(last[a] - first[a] + 1);
    return n;
  }
  std::optional<IndexBox> meet(const IndexBox& o) const {
    IndexBox out{first, last};
    for (std::size_t a = 0; a < first.size(); ++a) {
      out.first[a] = std::max(first[a], o.first[a]);
      out.last[a] = std::min(last[a], o.last[a]);
      if (out.first[a] > out.last[a]) return std::nullopt;
    }
    return out;
  }
};

namespace detail {

/// |union of boxes| by inclusion-exclusion.
inline double union_size(std::span<const IndexBox> boxes) {
  double total = 0.0;
  std::function<void(std::size_t, const IndexBox&, int)> rec = [&](std::size_t next, const IndexBox& run, int depth) {
    for (std::size_t k = next; k < boxes.size(); ++k) {
      auto m = run.meet(boxes[k]);
      if (!m) continue;
      total += (depth % 2 == 0) ? -m->size() : m->size();
      rec(k + 1, *m, depth + 1);
    }
  };
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    total += boxes[k].size();
    rec(k + 1, boxes[k], 0);
  }
  return total;
}

}  // namespace detail

struct LatticeGroup {
  Isometry map;
  Box base;
  std::vector<std::size_t> axes;
  std::vector<double> steps;
  std::vector<std::size_t> counts;
  std::vector<IndexBox> excluded;

  double raw_count() const {
    double n = 1.0;
    for (auto c : counts) n *= static_cast<double>(c);
    return n;
  }
  double kept_count() const { return raw_count() - detail::union_size(excluded); }
  double cell_volume() const { return base.volume(); }

  bool is_excluded(std::span<const std::size_t> k) const {
    return std::any_of(excluded.begin(), excluded.end(), [&](const IndexBox& b) { return b.contains(k); });
  }

  /// Source-frame box of lattice cell k.
  Box cell_box(std::span<const std::size_t> k) const {
    Box b = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const double shift = static_cast<double>(k[a]) * steps[a];
      b.edges[axes[a]].lo += shift;
      b.edges[axes[a]].hi += shift;
    }
    return b;
  }

  /// Mixed-radix decoding, last axis fastest.
  std::vector<std::size_t> decode(std::uint64_t index) const {
    std::vector<std::size_t> k(counts.size());
    for (std::size_t a = counts.size(); a-- > 0;) {
      k[a] = static_cast<std::size_t>(index % counts[a]);
      index /= counts[a];
    }
    return k;
  }

  /// Cell k as a cylinder f(J): in-cube boxes become basic cylinders directly,
  /// otherwise the base cylinder is translated before f is applied.
  Cylinder cell(std::span<const std::size_t> k) const {
    const Box b = cell_box(k);
    const bool in_cube = std::all_of(b.edges.begin(), b.edges.end(), [](const Interval& e) {
      return e.lo >= -kEndpointTol && e.hi <= 1.0 + kEndpointTol;
    });
    if (in_cube) return Cylinder(BasicCylinder::from_box(b), map);
    Point offset = Point(std::vector<double>(base.explicit_size(), 0.0));
    for (std::size_t a = 0; a < axes.size(); ++a) offset.set(axes[a], static_cast<double>(k[a]) * steps[a]);
    return Cylinder(BasicCylinder::from_box(base), map.after_translation(offset));
  }
};

/// The set a covering is meant to cover: map(union of members).
struct CoveringTarget {
  std::string label;
  std::vector<BasicCylinder> members;
  Isometry map;
};

struct Covering {
  CoveringTarget target;
  double delta = 0.0;
  std::vector<LatticeGroup> groups;
  // Grid parameters when the covering is a (restricted) uniform grid.
  std::size_t grid_n = 0;
  std::size_t grid_m = 0;

  double cell_count() const {
    double n = 0.0;
    for (const auto& g : groups) n += g.kept_count();
    return n;
  }
  double total_volume() const {
    double v = 0.0;
    for (const auto& g : groups) {
      const double cv = g.cell_volume();
      if (cv != 0.0) v += g.kept_count() * cv;
    }
    return v;
  }
  /// Every cell of a group is an isometric copy of its base box.
  double max_diameter(const WeightSequence& w) const {
    double d = 0.0;
    for (const auto& g : groups) d = std::max(d, g.base.diameter(w));
    return d;
  }

  /// Visits kept cells in group order, lattice order within each group.
  template <class Visitor>
  void for_each_cell(Visitor&& visit) const {
    for (const auto& g : groups) {
      const auto raw = static_cast<std::uint64_t>(g.raw_count());
      for (std::uint64_t i = 0; i < raw; ++i) {
        const auto k = g.decode(i);
        if (!g.is_excluded(k)) visit(g.cell(k));
      }
    }
  }
};

/// Post-composes every cell map (and the target) with g.
inline Covering map_covering(const Covering& c, const Isometry& g) {
  Covering out = c;
  out.target.map = c.target.map.then(g);
  for (auto& grp : out.groups) grp.map = grp.map.then(g);
  return out;
}

namespace detail {

inline void check_budget(double cells, std::size_t budget, const std::string& what) {
  if (cells > static_cast<double>(budget))
    throw BudgetExceeded(what + " needs " + std::to_string(static_cast<long double>(cells)) +
                             " cells, budget is " + std::to_string(budget),
                         cells, budget);
}

/// floor(x), except values within 1e-12 (relative) of an integer snap to it.
inline double snapped_floor(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return r;
  return std::floor(x);
}

}  // namespace detail

// ---------------------------------------------------------------- grid

struct GridSpec {
  std::size_t n = 0;  // subdivided coordinates 0..n-1
  std::size_t m = 1;  // parts per coordinate
  double cell_diameter = 0.0;
};

/// n minimal with T(n) <= delta^2/2, then m minimal with S_n / m^2 <= delta^2/2,
/// bumped until the cell diameter is strictly below delta.
inline GridSpec grid_spec(const WeightSequence& w, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  const auto& t = w.tails();
  GridSpec s;
  if (std::sqrt(t.total()) < delta) {
    s.cell_diameter = std::sqrt(t.total());
    return s;
  }
  const double half = delta * delta / 2.0;
  while (t.remainder(s.n) > half) ++s.n;
  const double explicit_sum = t.partial(0, s.n);
  s.m = static_cast<std::size_t>(std::max(1.0, std::ceil(std::sqrt(explicit_sum / half))));
  auto diam_sq = [&](std::size_t m) {
    return explicit_sum / (static_cast<double>(m) * static_cast<double>(m)) + t.remainder(s.n);
  };
  while (diam_sq(s.m) >= delta * delta) ++s.m;
  s.cell_diameter = std::sqrt(diam_sq(s.m));
  return s;
}

namespace detail {

inline Box grid_cell_box(const GridSpec& s, std::span<const std::size_t> k) {
  Box b;
  b.edges.resize(s.n);
  for (std::size_t i = 0; i < s.n; ++i) b.edges[i] = split_piece({0.0, 1.0}, s.m, k[i]);
  return b;
}

inline LatticeGroup grid_group(const GridSpec& s, const IndexBox& range) {
  LatticeGroup g;
  g.base = grid_cell_box(s, range.first);
  for (std::size_t i = 0; i < s.n; ++i) {
    g.axes.push_back(i);
    g.steps.push_back(1.0 / static_cast<double>(s.m));
    g.counts.push_back(range.last[i] - range.first[i] + 1);
  }
  return g;
}

}  // namespace detail

/// The m^n grid partition of I^omega into cells of diameter < delta.
inline Covering grid_covering(const WeightSequence& w, double delta, std::size_t budget = kDefaultCellBudget) {
  const GridSpec s = grid_spec(w, delta);
  detail::check_budget(std::pow(static_cast<double>(s.m), static_cast<double>(s.n)), budget, "grid covering");
  Covering c;
  c.target = {"cube", {BasicCylinder::cube()}, Isometry::identity()};
  c.delta = delta;
  c.grid_n = s.n;
  c.grid_m = s.m;
  IndexBox all{std::vector<std::size_t>(s.n, 0), std::vector<std::size_t>(s.n, s.m - 1)};
  c.groups.push_back(detail::grid_group(s, all));
  return c;
}

namespace detail {

/// Grid indices of the cells whose interiors meet J (one cell for a pinned coordinate).
inline IndexBox grid_index_box(const GridSpec& s, const BasicCylinder& j) {
  IndexBox b{std::vector<std::size_t>(s.n), std::vector<std::size_t>(s.n)};
  const double m = static_cast<double>(s.m);
  const auto top = static_cast<double>(s.m - 1);
  for (std::size_t i = 0; i < s.n; ++i) {
    const Edge e = j.edge(i);
    if (e.is_singleton()) {
      const double k = std::min(std::floor(e.p1() * m), top);
      b.first[i] = b.last[i] = static_cast<std::size_t>(k);
    } else {
      const double lo = std::clamp(std::floor(e.lower() * m + 1e-12), 0.0, top);
      const double hi = std::clamp(std::ceil(e.upper() * m - 1e-12) - 1.0, lo, top);
      b.first[i] = static_cast<std::size_t>(lo);
      b.last[i] = static_cast<std::size_t>(hi);
    }
  }
  return b;
}

/// Re-express a global index box in the local indices of `range`, clipped.
inline std::optional<IndexBox> localize(const IndexBox& global, const IndexBox& range) {
  auto m = global.meet(range);
  if (!m) return std::nullopt;
  for (std::size_t a = 0; a < m->first.size(); ++a) {
    m->first[a] -= range.first[a];
    m->last[a] -= range.first[a];
  }
  return m;
}

}  // namespace detail

/// Grid cells (same n, m as grid_covering) that meet some member of U.
inline Covering restricted_grid_covering(const CylinderUnion& u, const WeightSequence& w, double delta,
                                         std::size_t budget = kDefaultCellBudget) {
  const GridSpec s = grid_spec(w, delta);
  Covering c;
  c.target = {"union", u.members, Isometry::identity()};
  c.delta = delta;
  c.grid_n = s.n;
  c.grid_m = s.m;
  std::vector<IndexBox> ranges;
  for (const auto& j : u.members) {
    const IndexBox range = detail::grid_index_box(s, j);
    LatticeGroup g = detail::grid_group(s, range);
    for (const auto& earlier : ranges)
      if (auto loc = detail::localize(earlier, range)) g.excluded.push_back(*loc);
    ranges.push_back(range);
    c.groups.push_back(std::move(g));
  }
  detail::check_budget(c.cell_count(), budget, "restricted grid covering");
  return c;
}

// ---------------------------------------------------------------- efficient coverings

/// Translates of J* = (corner cylinder of J with edge b*) that cover J.
struct EfficientCoveringPlan {
  BasicCylinder j;
  BasicCylinder j_star;
  double b_star = 1.0;
  std::vector<std::size_t> axes;      // restricted, non-pinned coordinates
  std::vector<std::size_t> per_axis;  // [len / b*] + 1
  double count = 1.0;                 // product of per_axis
};

/// Covered coordinates of J: the left-anchored, interior and right-anchored ones.
inline std::vector<std::size_t> covered_axes(const BasicCylinder& j) {
  std::vector<std::size_t> axes;
  for (std::size_t i = 0; i < j.explicit_size(); ++i) {
    const auto k = j.edge(i).kind();
    if (k == EdgeKind::left_anchored || k == EdgeKind::interior || k == EdgeKind::right_anchored) axes.push_back(i);
  }
  return axes;
}

inline EfficientCoveringPlan plan_efficient_covering(const BasicCylinder& j, double b_star) {
  EfficientCoveringPlan plan;
  plan.j = j;
  plan.axes = covered_axes(j);
  if (plan.axes.empty()) {
    plan.j_star = j;
    return plan;
  }
  for (auto a : plan.axes)
    if (!(b_star > 0.0 && b_star < j.edge(a).length()))
      throw InvalidArgument("b* must be positive and shorter than every covered edge");
  plan.b_star = b_star;
  std::vector<Edge> star = j.coords();
  for (auto a : plan.axes) {
    const Edge e = j.edge(a);
    star[a] = e.kind() == EdgeKind::left_anchored ? Edge::left_anchored(b_star)
                                                  : Edge::from_interval({e.p1(), e.p1() + b_star});
    const double parts = detail::snapped_floor(e.length() / b_star) + 1.0;
    plan.per_axis.push_back(static_cast<std::size_t>(parts));
    plan.count *= parts;
  }
  plan.j_star = BasicCylinder(std::move(star));
  return plan;
}

/// prod (len_j + b) - prod len_j, the excess bound of a b-translate covering.
inline double excess_bound(const BasicCylinder& j, double b) {
  double with = 1.0;
  double without = 1.0;
  for (auto a : covered_axes(j)) {
    with *= j.edge(a).length() + b;
    without *= j.edge(a).length();
  }
  return with - without;
}

/// Largest b* (to bisection precision) whose excess bound is <= epsilon, also
/// checked against the realized excess count * vol(J*) - vol(J).
inline double choose_b_star(const BasicCylinder& j, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const auto axes = covered_axes(j);
  if (axes.empty()) return 1.0;
  double shortest = 1.0;
  for (auto a : axes) shortest = std::min(shortest, j.edge(a).length());
  const double b_max = shortest * (1.0 - 1e-9);
  double b = b_max;
  if (excess_bound(j, b_max) > epsilon) {
    double lo = 0.0;
    double hi = b_max;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (excess_bound(j, mid) <= epsilon ? lo : hi) = mid;
    }
    b = lo;
  }
  if (is_degenerate(j)) return b;
  for (int guard = 0; guard < 64 && b > 0.0; ++guard) {
    const auto plan = plan_efficient_covering(j, b);
    if (plan.count * volume(plan.j_star) - volume(j) <= epsilon) break;
    b *= 1.0 - 1e-6;
  }
  return b;
}

/// Covers K = f(J) by translates f(J* + offset), total volume <= vol(K) + epsilon.
inline Covering efficient_covering(const Cylinder& k, double delta, double epsilon, const WeightSequence& w,
                                   std::size_t budget = kDefaultCellBudget) {
  const BasicCylinder& j = k.source();
  const auto plan = plan_efficient_covering(j, choose_b_star(j, epsilon));
  const double star_diam = diameter(plan.j_star, w);
  if (!(star_diam < delta))
    throw PreconditionFailed("efficient covering: diameter of J* (" + std::to_string(star_diam) +
                             ") is not below delta (" + std::to_string(delta) + ")");
  detail::check_budget(plan.count, budget, "efficient covering");

  Covering c;
  c.target = {"cylinder", {j}, k.map()};
  c.delta = delta;
  LatticeGroup g;
  g.map = k.map();
  g.base = plan.j_star.box();
  g.axes = plan.axes;
  g.steps.assign(plan.axes.size(), plan.b_star);
  g.counts = plan.per_axis;
  c.groups.push_back(std::move(g));
  return c;
}

// ---------------------------------------------------------------- refine-then-map

/// Parts per coordinate (index = coordinate) for splitting J into pieces of
/// diameter < delta. Greedy: repeatedly split the coordinate with the best
/// reduction of diameter^2 per unit of log(cell count).
inline std::vector<std::size_t> refinement_parts(const BasicCylinder& j, const WeightSequence& w, double delta,
                                                 std::size_t budget = kDefaultCellBudget) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  const auto& t = w.tails();
  const double target = delta * delta;
  std::size_t n = j.explicit_size();
  while (t.remainder(n) > target * 1e-3) ++n;

  std::vector<double> contribution(n);
  std::vector<std::size_t> parts(n, 1);
  double diam_sq = t.remainder(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double len = j.edge(i).length();
    contribution[i] = w.squared(i) * len * len;
    diam_sq += contribution[i];
  }

  auto gain = [&](std::size_t i) {
    const auto m = static_cast<double>(parts[i]);
    return contribution[i] * (1.0 / (m * m) - 1.0 / ((m + 1) * (m + 1))) / std::log((m + 1) / m);
  };
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (contribution[i] > 0.0) queue.push({gain(i), i});

  double cells = 1.0;
  while (!(diam_sq < target)) {
    if (queue.empty()) throw Error("refinement cannot reach the requested diameter");
    const auto [g, i] = queue.top();
    queue.pop();
    const auto m = static_cast<double>(parts[i]);
    diam_sq -= contribution[i] * (1.0 / (m * m) - 1.0 / ((m + 1) * (m + 1)));
    cells = cells / m * (m + 1);
    detail::check_budget(cells, budget, "refinement");
    ++parts[i];
    queue.push({gain(i), i});
  }
  return parts;
}

namespace detail {

/// Lattice of equal pieces of J given per-coordinate part counts.
inline LatticeGroup refinement_group(const BasicCylinder& j, std::span<const std::size_t> parts) {
  LatticeGroup g;
  g.base = j.padded(parts.size()).box();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] <= 1) continue;
    const Interval e = g.base.edges[i];
    g.base.edges[i] = split_piece(e, parts[i], 0);
    g.axes.push_back(i);
    g.steps.push_back(e.length() / static_cast<double>(parts[i]));
    g.counts.push_back(parts[i]);
  }
  return g;
}

/// Local indices of the pieces of `g` that lie inside the basic cylinder `other`.
inline std::optional<IndexBox> pieces_inside(const LatticeGroup& g, const BasicCylinder& other,
                                             double tol = kEndpointTol) {
  const std::size_t n = std::max(g.base.explicit_size(), other.explicit_size());
  IndexBox box{std::vector<std::size_t>(g.axes.size()), std::vector<std::size_t>(g.axes.size())};
  std::size_t a = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Interval mine = g.base.edge(i);
    const Interval theirs = other.edge(i).interval();
    if (a < g.axes.size() && g.axes[a] == i) {
      const double s = g.steps[a];
      const double lo = std::max(0.0, std::ceil((theirs.lo - mine.lo - tol) / s));
      const double hi = std::min(static_cast<double>(g.counts[a] - 1), std::floor((theirs.hi - mine.hi + tol) / s));
      if (lo > hi) return std::nullopt;
      box.first[a] = static_cast<std::size_t>(lo);
      box.last[a] = static_cast<std::size_t>(hi);
      ++a;
    } else if (!theirs.contains(mine, tol)) {
      return std::nullopt;
    }
  }
  return box;
}

}  // namespace detail

/// Refines every member of U to pieces of diameter < delta, drops pieces lying
/// inside an earlier member, and maps the rest through f. Volumes are carried
/// over from the pieces.
inline Covering cover_image_union(const CylinderUnion& u, const Isometry& f, double delta, const WeightSequence& w,
                                  std::size_t budget = kDefaultCellBudget) {
  Covering c;
  c.target = {"image", u.members, f};
  c.delta = delta;
  for (std::size_t k = 0; k < u.members.size(); ++k) {
    const auto parts = refinement_parts(u.members[k], w, delta, budget);
    LatticeGroup g = detail::refinement_group(u.members[k], parts);
    g.map = f;
    for (std::size_t e = 0; e < k; ++e)
      if (auto inside = detail::pieces_inside(g, u.members[e])) g.excluded.push_back(*inside);
    c.groups.push_back(std::move(g));
  }
  detail::check_budget(c.cell_count(), budget, "image covering");
  return c;
}

// ---------------------------------------------------------------- validation

struct CoveringReport {
  bool pass = true;
  bool diameters_ok = true;
  double max_diameter = 0.0;
  std::size_t probes = 0;
  std::size_t misses = 0;
  std::optional<Point> witness;  // first uncovered probe (target coordinates)
};

namespace detail {

inline bool group_covers(const LatticeGroup& g, const Point& z, double tol) {
  const std::size_t n = std::max(g.base.explicit_size(), z.explicit_size());
  std::vector<std::size_t> lo(g.axes.size()), hi(g.axes.size());
  std::size_t a = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Interval e = g.base.edge(i);
    if (a < g.axes.size() && g.axes[a] == i) {
      const double s = g.steps[a];
      const double kmin = std::max(0.0, std::ceil((z[i] - tol - e.hi) / s));
      const double kmax = std::min(static_cast<double>(g.counts[a] - 1), std::floor((z[i] + tol - e.lo) / s));
      if (kmin > kmax) return false;
      lo[a] = static_cast<std::size_t>(kmin);
      hi[a] = static_cast<std::size_t>(kmax);
      ++a;
    } else if (!e.contains(z[i], tol)) {
      return false;
    }
  }
  if (z.tail() < -tol || z.tail() > 1.0 + tol) return false;

  // Candidates are the few lattice cells whose box can contain z.
  std::vector<std::size_t> k = lo;
  while (true) {
    if (!g.is_excluded(k) && g.cell_box(k).contains(z, tol)) return true;
    std::size_t d = k.size();
    while (d > 0) {
      --d;
      if (k[d] < hi[d]) {
        ++k[d];
        break;
      }
      k[d] = lo[d];
      if (d == 0) return false;
    }
    if (k.empty()) return false;
  }
}

inline Point sample_member(const BasicCylinder& j, std::span<const double> u) {
  std::vector<double> x(u.size() - 1);
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const Edge e = j.edge(i);
    x[i] = e.is_singleton() ? e.p1() : e.lower() + u[i] * e.length();
  }
  return Point(std::move(x), u.back());
}

}  // namespace detail

/// Checks the diameter condition analytically and containment on `probes`
/// quasi-random points of the target (plus the members' corners). A probe is
/// covered when some cell, pulled back through its isometry, contains it.
inline CoveringReport validate_covering(const Covering& c, std::size_t probes, const WeightSequence& w,
                                        std::uint64_t seed = 1, double tol = 1e-9) {
  CoveringReport r;
  r.max_diameter = c.max_diameter(w);
  r.diameters_ok = r.max_diameter < c.delta;

  std::size_t dim = 0;
  for (const auto& m : c.target.members) dim = std::max(dim, m.explicit_size());
  for (const auto& g : c.groups) dim = std::max(dim, g.base.explicit_size());
  dim += 2;

  std::vector<Isometry> pullbacks;
  for (const auto& g : c.groups) pullbacks.push_back(inverse(g.map));

  const auto& members = c.target.members;
  std::vector<Point> corner_probes;
  for (const auto& m : members) {
    auto [lo, hi] = corners(m.padded(dim - 1));
    corner_probes.push_back(c.target.map(lo));
    corner_probes.push_back(c.target.map(hi));
  }
  const std::size_t total = members.empty() ? 0 : corner_probes.size() + probes;
  r.probes = total;

  const HaltonSequence halton(dim, seed);
  auto probe_at = [&](std::size_t i) -> Point {
    if (i < corner_probes.size()) return corner_probes[i];
    const std::size_t q = i - corner_probes.size();
    const auto u = halton.at(q);
    return c.target.map(detail::sample_member(members[q % members.size()], u));
  };
  auto covered = [&](const Point& y) {
    for (std::size_t g = 0; g < c.groups.size(); ++g)
      if (detail::group_covers(c.groups[g], pullbacks[g](y), tol)) return true;
    return false;
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  const std::size_t chunk = (total + workers - 1) / std::max<std::size_t>(workers, 1);
  std::vector<std::size_t> misses(workers, 0);
  std::vector<std::size_t> first_miss(workers, std::numeric_limits<std::size_t>::max());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(total, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
          if (covered(probe_at(i))) continue;
          ++misses[t];
          first_miss[t] = std::min(first_miss[t], i);
        }
      });
    }
  }
  std::size_t first = std::numeric_limits<std::size_t>::max();
  for (std::size_t t = 0; t < workers; ++t) {
    r.misses += misses[t];
    first = std::min(first, first_miss[t]);
  }
  if (r.misses > 0) r.witness = probe_at(first);
  r.pass = r.diameters_ok && r.misses == 0;
  return r;
}

}  // namespace hcube
