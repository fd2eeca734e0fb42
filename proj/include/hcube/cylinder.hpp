#pragma once

// Basic cylinders: products of closed intervals in [0, 1] where only finitely
// many coordinates are restricted. Each restricted coordinate carries one of
// five tagged kinds so the degeneracy and volume rules become pattern matches.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcube/errors.hpp"
#include "hcube/weighted_space.hpp"

namespace hcube {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double v, double tol = kEndpointTol) const { return v >= lo - tol && v <= hi + tol; }
  bool contains(const Interval& o, double tol = kEndpointTol) const {
    return o.lo >= lo - tol && o.hi <= hi + tol;
  }
};

enum class EdgeKind { left_anchored, interior, right_anchored, singleton, full };

/// One coordinate factor J_i of a basic cylinder.
class Edge {
 public:
  /// [0, p2] with 0 < p2 < 1.
  static Edge left_anchored(double p2) {
    if (!(p2 > 0.0 && p2 < 1.0)) throw InvalidArgument("left_anchored edge needs 0 < p2 < 1");
    return Edge(EdgeKind::left_anchored, 0.0, p2);
  }
  /// [p1, p2] with 0 < p1 < p2 < 1.
  static Edge interior(double p1, double p2) {
    if (!(p1 > 0.0 && p1 < p2 && p2 < 1.0)) throw InvalidArgument("interior edge needs 0 < p1 < p2 < 1");
    return Edge(EdgeKind::interior, p1, p2);
  }
  /// [p1, 1] with 0 < p1 < 1.
  static Edge right_anchored(double p1) {
    if (!(p1 > 0.0 && p1 < 1.0)) throw InvalidArgument("right_anchored edge needs 0 < p1 < 1");
    return Edge(EdgeKind::right_anchored, p1, 1.0);
  }
  /// {p1} with 0 <= p1 <= 1.
  static Edge singleton(double p1) {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw InvalidArgument("singleton edge needs 0 <= p1 <= 1");
    return Edge(EdgeKind::singleton, p1, p1);
  }
  static Edge full() { return Edge(EdgeKind::full, 0.0, 1.0); }

  /// Classify a closed interval inside [0, 1]. Endpoints within tol of 0 or 1
  /// snap to the boundary; intervals shorter than tol collapse to a singleton.
  static Edge from_interval(Interval iv, double tol = kEndpointTol) {
    if (!(iv.lo >= -tol && iv.hi <= 1.0 + tol && iv.lo <= iv.hi + tol))
      throw InvalidArgument("interval is not a closed subinterval of [0, 1]");
    double lo = std::clamp(iv.lo, 0.0, 1.0);
    double hi = std::clamp(iv.hi, 0.0, 1.0);
    if (hi - lo <= tol) return singleton(lo);
    if (lo <= tol) lo = 0.0;
    if (hi >= 1.0 - tol) hi = 1.0;
    if (lo == 0.0 && hi == 1.0) return full();
    if (lo == 0.0) return left_anchored(hi);
    if (hi == 1.0) return right_anchored(lo);
    return interior(lo, hi);
  }

  EdgeKind kind() const { return kind_; }
  double p1() const { return p1_; }
  double p2() const { return p2_; }
  double lower() const { return p1_; }
  double upper() const { return p2_; }
  double length() const { return kind_ == EdgeKind::singleton ? 0.0 : p2_ - p1_; }
  Interval interval() const { return {p1_, p2_}; }
  bool is_singleton() const { return kind_ == EdgeKind::singleton; }

  friend bool operator==(const Edge&, const Edge&) = default;

 private:
  Edge(EdgeKind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {}

  EdgeKind kind_;
  double p1_;
  double p2_;
};

/// A product of closed intervals over an explicit prefix; every coordinate past
/// the prefix is [0, 1]. Unlike BasicCylinder the intervals may leave [0, 1],
/// which is how translated covering cells are represented in their source frame.
struct Box {
  std::vector<Interval> edges;

  Interval edge(std::size_t i) const { return i < edges.size() ? edges[i] : Interval{0.0, 1.0}; }
  std::size_t explicit_size() const { return edges.size(); }

  bool degenerate(double tol = kEndpointTol) const {
    return std::any_of(edges.begin(), edges.end(), [tol](const Interval& e) { return e.length() <= tol; });
  }

  double volume(double tol = kEndpointTol) const {
    if (degenerate(tol)) return 0.0;
    double v = 1.0;
    for (const auto& e : edges) v *= e.length();
    return v;
  }

  double diameter(const WeightSequence& w) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const double len = edges[i].length();
      sum += w.squared(i) * len * len;
    }
    return std::sqrt(sum + w.tails().remainder(edges.size()));
  }

  bool contains(const Point& x, double tol = kEndpointTol) const {
    const std::size_t n = std::max(edges.size(), x.explicit_size());
    for (std::size_t i = 0; i < n; ++i)
      if (!edge(i).contains(x[i], tol)) return false;
    return x.tail() >= -tol && x.tail() <= 1.0 + tol;
  }

  Point lower_corner() const {
    std::vector<double> v(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) v[i] = edges[i].lo;
    return Point(std::move(v), 0.0);
  }
  Point upper_corner() const {
    std::vector<double> v(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) v[i] = edges[i].hi;
    return Point(std::move(v), 1.0);
  }

  Box padded(std::size_t n) const {
    Box out = *this;
    if (out.edges.size() < n) out.edges.resize(n, Interval{0.0, 1.0});
    return out;
  }
};

class BasicCylinder {
 public:
  /// The whole cube I^omega.
  BasicCylinder() = default;
  explicit BasicCylinder(std::vector<Edge> coords) : coords_(std::move(coords)) {}

  static BasicCylinder cube() { return {}; }

  /// Classify every interval of an in-cube box.
  static BasicCylinder from_box(const Box& b, double tol = kEndpointTol) {
    std::vector<Edge> coords;
    coords.reserve(b.edges.size());
    for (const auto& iv : b.edges) coords.push_back(Edge::from_interval(iv, tol));
    return BasicCylinder(std::move(coords));
  }

  Edge edge(std::size_t i) const { return i < coords_.size() ? coords_[i] : Edge::full(); }
  std::size_t explicit_size() const { return coords_.size(); }
  const std::vector<Edge>& coords() const { return coords_; }

  BasicCylinder padded(std::size_t n) const {
    BasicCylinder out = *this;
    if (out.coords_.size() < n) out.coords_.resize(n, Edge::full());
    return out;
  }

  Box box() const {
    Box b;
    b.edges.reserve(coords_.size());
    for (const auto& e : coords_) b.edges.push_back(e.interval());
    return b;
  }

  /// Equal as sets: same edges after padding to a common prefix.
  friend bool operator==(const BasicCylinder& a, const BasicCylinder& b) {
    const std::size_t n = std::max(a.coords_.size(), b.coords_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (!(a.edge(i) == b.edge(i))) return false;
    return true;
  }

 private:
  std::vector<Edge> coords_;
};

/// A finite union of basic cylinders.
struct CylinderUnion {
  std::vector<BasicCylinder> members;
};

/// Lambda(J) = N minus the pinned (singleton) coordinates.
struct LambdaSet {
  std::vector<std::size_t> excluded;
  bool cofinite = true;

  bool contains(std::size_t i) const {
    const bool listed = std::binary_search(excluded.begin(), excluded.end(), i);
    return cofinite ? !listed : listed;
  }
  bool is_everything() const { return cofinite && excluded.empty(); }
};

inline LambdaSet lambda_set(const BasicCylinder& j) {
  LambdaSet out;
  for (std::size_t i = 0; i < j.explicit_size(); ++i)
    if (j.edge(i).is_singleton()) out.excluded.push_back(i);
  return out;
}

inline bool is_degenerate(const BasicCylinder& j) {
  return std::any_of(j.coords().begin(), j.coords().end(), [](const Edge& e) { return e.is_singleton(); });
}

/// Elementary volume: product of explicit edge lengths, 0 when degenerate.
inline double volume(const BasicCylinder& j) {
  if (is_degenerate(j)) return 0.0;
  double v = 1.0;
  for (const auto& e : j.coords()) v *= e.length();
  return v;
}

/// sup d_a over J, attained at opposite corners.
inline double diameter(const BasicCylinder& j, const WeightSequence& w) { return j.box().diameter(w); }

inline std::pair<Point, Point> corners(const BasicCylinder& j) {
  const Box b = j.box();
  return {b.lower_corner(), b.upper_corner()};
}

inline bool contains_point(const BasicCylinder& j, const Point& x, double tol = kEndpointTol) {
  return j.box().contains(x, tol);
}

/// Coordinatewise intersection; nullopt when empty. Zero-length overlaps become singletons.
inline std::optional<BasicCylinder> intersect(const BasicCylinder& a, const BasicCylinder& b,
                                              double tol = kEndpointTol) {
  const std::size_t n = std::max(a.explicit_size(), b.explicit_size());
  std::vector<Edge> coords;
  coords.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Interval x = a.edge(i).interval();
    const Interval y = b.edge(i).interval();
    const double lo = std::max(x.lo, y.lo);
    const double hi = std::min(x.hi, y.hi);
    if (lo > hi + tol) return std::nullopt;
    coords.push_back(Edge::from_interval({lo, std::max(lo, hi)}, tol));
  }
  return BasicCylinder(std::move(coords));
}

inline constexpr std::size_t kMaxInclusionExclusionMembers = 20;

namespace detail {

inline void inclusion_exclusion(std::span<const BasicCylinder> members, std::size_t next,
                                const BasicCylinder& running, int depth, double& total) {
  for (std::size_t k = next; k < members.size(); ++k) {
    auto meet = intersect(running, members[k]);
    if (!meet) continue;
    const double v = volume(*meet);
    total += (depth % 2 == 0) ? -v : v;
    // Degenerate intersections stay degenerate under further intersection.
    if (v > 0.0) inclusion_exclusion(members, k + 1, *meet, depth + 1, total);
  }
}

}  // namespace detail

/// Exact product measure of a finite union by inclusion-exclusion.
inline double pi_measure(std::span<const BasicCylinder> members) {
  if (members.size() > kMaxInclusionExclusionMembers)
    throw InvalidArgument("pi_measure supports at most 20 members, got " + std::to_string(members.size()));
  double total = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const double v = volume(members[k]);
    total += v;
    if (v > 0.0) detail::inclusion_exclusion(members, k + 1, members[k], 0, total);
  }
  return total;
}

inline double pi_measure(const CylinderUnion& u) { return pi_measure(std::span<const BasicCylinder>(u.members)); }

/// Split [lo, hi] into `parts` equal closed pieces; the last piece ends exactly at hi.
inline Interval split_piece(Interval iv, std::size_t parts, std::size_t k) {
  const double len = iv.hi - iv.lo;
  const double lo = iv.lo + len * static_cast<double>(k) / static_cast<double>(parts);
  const double hi = (k + 1 == parts) ? iv.hi : iv.lo + len * static_cast<double>(k + 1) / static_cast<double>(parts);
  return {lo, hi};
}

/// Grid of sub-cylinders; output is lexicographic in the part indices with the
/// lowest named coordinate most significant.
inline std::vector<BasicCylinder> subdivide(const BasicCylinder& j,
                                            const std::map<std::size_t, std::size_t>& per_coord_parts) {
  std::size_t n = j.explicit_size();
  for (const auto& [coord, parts] : per_coord_parts) {
    if (parts == 0) throw InvalidArgument("subdivide: zero parts requested");
    if (j.edge(coord).is_singleton()) throw InvalidArgument("subdivide: cannot split a singleton coordinate");
    n = std::max(n, coord + 1);
  }
  const BasicCylinder base = j.padded(n);
  std::vector<std::pair<std::size_t, std::size_t>> axes(per_coord_parts.begin(), per_coord_parts.end());

  std::vector<BasicCylinder> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    std::vector<Edge> coords = base.coords();
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto [coord, parts] = axes[a];
      coords[coord] = Edge::from_interval(split_piece(base.edge(coord).interval(), parts, idx[a]));
    }
    out.emplace_back(std::move(coords));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
    if (axes.empty()) return out;
  }
}

}  // namespace hcube
