#pragma once

// d_a-isometries built from volume-preserving generators. An Isometry maps
//   x  ->  q + G_k(...G_1(x - p))
// where each G is a translation, a coordinate reflection, a permutation of
// equal-weight coordinates, or a planar rotation of two equal-weight
// coordinates. Only the translations are affine; the rest are linear and
// orthogonal in <.,.>_a.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "hcube/cylinder.hpp"
#include "hcube/errors.hpp"
#include "hcube/weighted_space.hpp"

namespace hcube {

struct Translation {
  Point offset;
};

/// v_i -> -v_i (about the base point).
struct Reflection {
  std::size_t coord;
};

/// Moves coordinate i to position sigma(i) for every listed pair; other coordinates are fixed.
struct Permutation {
  std::map<std::size_t, std::size_t> sigma;

  Permutation inverse() const {
    Permutation inv;
    for (const auto& [from, to] : sigma) inv.sigma[to] = from;
    return inv;
  }
};

/// (v_i, v_j) -> (cos t v_i - sin t v_j, sin t v_i + cos t v_j).
struct Rotation {
  std::size_t i;
  std::size_t j;
  double theta;
};

using Generator = std::variant<Translation, Reflection, Permutation, Rotation>;

namespace detail {

inline std::size_t max_coord(const Generator& g) {
  return std::visit(
      [](const auto& gen) -> std::size_t {
        using T = std::decay_t<decltype(gen)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return gen.offset.explicit_size();
        } else if constexpr (std::is_same_v<T, Reflection>) {
          return gen.coord + 1;
        } else if constexpr (std::is_same_v<T, Permutation>) {
          std::size_t m = 0;
          for (const auto& [a, b] : gen.sigma) m = std::max({m, a + 1, b + 1});
          return m;
        } else {
          return std::max(gen.i, gen.j) + 1;
        }
      },
      g);
}

inline void apply_generator(const Generator& g, Point& v) {
  std::visit(
      [&v](const auto& gen) {
        using T = std::decay_t<decltype(gen)>;
        if constexpr (std::is_same_v<T, Translation>) {
          v += gen.offset;
        } else if constexpr (std::is_same_v<T, Reflection>) {
          v.set(gen.coord, -v[gen.coord]);
        } else if constexpr (std::is_same_v<T, Permutation>) {
          const Point before = v;
          for (const auto& [from, to] : gen.sigma) v.set(to, before[from]);
        } else {
          const double c = std::cos(gen.theta);
          const double s = std::sin(gen.theta);
          const double vi = v[gen.i];
          const double vj = v[gen.j];
          v.set(gen.i, c * vi - s * vj);
          v.set(gen.j, s * vi + c * vj);
        }
      },
      g);
}

inline Generator invert_generator(const Generator& g) {
  return std::visit(
      [](const auto& gen) -> Generator {
        using T = std::decay_t<decltype(gen)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return Translation{-gen.offset};
        } else if constexpr (std::is_same_v<T, Reflection>) {
          return gen;
        } else if constexpr (std::is_same_v<T, Permutation>) {
          return gen.inverse();
        } else {
          return Rotation{gen.i, gen.j, -gen.theta};
        }
      },
      g);
}

}  // namespace detail

class Isometry {
 public:
  /// The identity with p = q = 0.
  Isometry() = default;
  Isometry(Point base_in, Point base_out, std::vector<Generator> gens = {})
      : base_in_(std::move(base_in)), base_out_(std::move(base_out)), gens_(std::move(gens)) {
    for (const auto& g : gens_) {
      if (const auto* perm = std::get_if<Permutation>(&g)) {
        std::vector<std::size_t> targets;
        for (const auto& [from, to] : perm->sigma) {
          if (!perm->sigma.contains(to)) throw InvalidArgument("permutation is not a bijection on its support");
          targets.push_back(to);
        }
        std::sort(targets.begin(), targets.end());
        if (std::adjacent_find(targets.begin(), targets.end()) != targets.end())
          throw InvalidArgument("permutation maps two coordinates to the same position");
      } else if (const auto* rot = std::get_if<Rotation>(&g)) {
        if (rot->i == rot->j) throw InvalidArgument("rotation needs two distinct coordinates");
      }
    }
  }

  static Isometry identity() { return {}; }

  const Point& base_in() const { return base_in_; }
  const Point& base_out() const { return base_out_; }
  const std::vector<Generator>& generators() const { return gens_; }

  /// Throws IncompatibleWeights if a permutation or rotation mixes unequal weights.
  void validate(const WeightSequence& w) const {
    for (const auto& g : gens_) {
      if (const auto* perm = std::get_if<Permutation>(&g)) {
        for (const auto& [from, to] : perm->sigma)
          if (!w.same_weight(from, to))
            throw IncompatibleWeights("permutation moves coordinate " + std::to_string(from + 1) +
                                      " onto coordinate " + std::to_string(to + 1) + " with a different weight");
      } else if (const auto* rot = std::get_if<Rotation>(&g)) {
        if (!w.same_weight(rot->i, rot->j))
          throw IncompatibleWeights("rotation mixes coordinates " + std::to_string(rot->i + 1) + " and " +
                                    std::to_string(rot->j + 1) + " with different weights");
      }
    }
  }

  /// Number of leading coordinates any generator touches.
  std::size_t support() const {
    std::size_t m = std::max(base_in_.explicit_size(), base_out_.explicit_size());
    for (const auto& g : gens_) m = std::max(m, detail::max_coord(g));
    return m;
  }

  Point operator()(const Point& x) const {
    Point v = x - base_in_;
    for (const auto& g : gens_) detail::apply_generator(g, v);
    return base_out_ + v;
  }

  /// Only the linear part, applied to a displacement vector.
  Point linear(const Point& v) const {
    Point out = v;
    for (const auto& g : gens_)
      if (!std::holds_alternative<Translation>(g)) detail::apply_generator(g, out);
    return out;
  }

  /// Translations, reflections and permutations only; boxes map to boxes.
  bool axis_preserving() const {
    return std::none_of(gens_.begin(), gens_.end(), [](const Generator& g) { return std::holds_alternative<Rotation>(g); });
  }

  /// x -> f(x + c).
  Isometry after_translation(const Point& c) const { return {base_in_ - c, base_out_, gens_}; }

  /// x -> g(f(x)).
  Isometry then(const Isometry& g) const {
    std::vector<Generator> gens = gens_;
    const Point bridge = base_out_ - g.base_in_;
    gens.push_back(Translation{bridge});
    gens.insert(gens.end(), g.gens_.begin(), g.gens_.end());
    return {base_in_, g.base_out_, std::move(gens)};
  }

 private:
  Point base_in_;
  Point base_out_;
  std::vector<Generator> gens_;
};

inline Point apply(const Isometry& f, const Point& x) { return f(x); }

inline Isometry inverse(const Isometry& f) {
  std::vector<Generator> gens;
  gens.reserve(f.generators().size());
  for (auto it = f.generators().rbegin(); it != f.generators().rend(); ++it)
    gens.push_back(detail::invert_generator(*it));
  return {f.base_out(), f.base_in(), std::move(gens)};
}

/// x -> x + c.
inline Isometry translation(const Point& c) { return {Point{}, Point{}, {Translation{c}}}; }

/// f(x) = offset + A x on the first `dim` coordinates; beyond them
/// f(x)_i = tail_offset + x_i.
struct AffineRows {
  std::size_t dim = 0;
  std::vector<std::vector<double>> a;  // a[row][col]
  std::vector<double> offset;
  double tail_offset = 0.0;
};

inline AffineRows affine_rows(const Isometry& f, std::size_t min_dim = 0) {
  AffineRows r;
  r.dim = std::max(f.support(), min_dim);
  const Point f0 = f(Point{}).padded(r.dim);
  r.offset.assign(f0.prefix().begin(), f0.prefix().begin() + static_cast<std::ptrdiff_t>(r.dim));
  r.tail_offset = f0.tail();
  r.a.assign(r.dim, std::vector<double>(r.dim, 0.0));
  for (std::size_t col = 0; col < r.dim; ++col) {
    const Point image = f.linear(Point::unit(col)).padded(r.dim);
    for (std::size_t row = 0; row < r.dim; ++row) r.a[row][col] = image[row];
  }
  return r;
}

/// Tight coordinatewise bounds of f(B); exact for axis-preserving maps. When f
/// shifts the unrestricted tail coordinates, the shifted range is appended as
/// one extra explicit edge so callers can detect the escape from I^omega.
inline Box image_bounds(const Isometry& f, const Box& b) {
  const AffineRows r = affine_rows(f, b.explicit_size());
  Box out;
  out.edges.resize(r.dim);
  for (std::size_t row = 0; row < r.dim; ++row) {
    double lo = r.offset[row];
    double hi = r.offset[row];
    for (std::size_t col = 0; col < r.dim; ++col) {
      const double c = r.a[row][col];
      if (c == 0.0) continue;
      const Interval e = b.edge(col);
      lo += c > 0 ? c * e.lo : c * e.hi;
      hi += c > 0 ? c * e.hi : c * e.lo;
    }
    out.edges[row] = {lo, hi};
  }
  if (std::abs(r.tail_offset) > kEndpointTol) {
    // Unrestricted tail coordinates are shifted off [0, 1]; record that as an
    // explicit coordinate just past the support.
    out.edges.push_back({r.tail_offset, 1.0 + r.tail_offset});
  }
  return out;
}

/// A point of B whose image under f has coordinate `coord` at its extreme
/// (minimum if `low`, else maximum).
inline Point extreme_preimage(const Isometry& f, const Box& b, std::size_t coord, bool low) {
  const AffineRows r = affine_rows(f, std::max(b.explicit_size(), coord + 1));
  Point x = b.lower_corner().padded(r.dim);
  for (std::size_t col = 0; col < r.dim; ++col) {
    const double c = r.a[coord][col];
    const Interval e = b.edge(col);
    x.set(col, ((c > 0) == low) ? e.lo : e.hi);
  }
  return x;
}

/// f(J) for an axis-preserving f, provided it stays inside I^omega.
inline std::optional<BasicCylinder> image_cylinder(const Isometry& f, const BasicCylinder& j,
                                                   double tol = kEndpointTol) {
  if (!f.axis_preserving()) throw PreconditionFailed("image_cylinder needs an axis-preserving isometry");
  const Box img = image_bounds(f, j.box());
  for (const auto& e : img.edges)
    if (e.lo < -tol || e.hi > 1.0 + tol) return std::nullopt;
  return BasicCylinder::from_box(img, tol);
}

/// K = f(J) for a basic cylinder J; vol(K) is vol(J) by definition.
class Cylinder {
 public:
  Cylinder(BasicCylinder source, Isometry map)
      : source_(std::move(source)), map_(std::move(map)), volume_(hcube::volume(source_)) {}

  const BasicCylinder& source() const { return source_; }
  const Isometry& map() const { return map_; }
  double volume() const { return volume_; }
  double diameter(const WeightSequence& w) const { return hcube::diameter(source_, w); }

  bool contains(const Point& y, double tol = kEndpointTol) const {
    return contains_point(source_, inverse(map_)(y), tol);
  }

 private:
  BasicCylinder source_;
  Isometry map_;
  double volume_;
};

}  // namespace hcube
