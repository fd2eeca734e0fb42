#pragma once

// Generalized linear spans GS(E, p) = { p + sum_i alpha_i (x_i - p) } and their
// orthonormal coordinates in <.,.>_a.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "hcube/cylinder.hpp"
#include "hcube/errors.hpp"
#include "hcube/weighted_space.hpp"

namespace hcube {

/// Orthonormal b_k together with the combinations that produced them:
/// b_k = sum_i coefficients[k][i] * input_i.
struct Orthonormalization {
  std::vector<Point> basis;
  std::vector<std::vector<double>> coefficients;
  std::vector<std::size_t> source;  // input index that contributed each b_k
};

/// Modified Gram-Schmidt with one re-orthogonalization pass. An input is
/// dropped when its residual norm is below rel_tol times the largest input norm.
inline Orthonormalization orthonormalize(std::span<const Point> vectors, const WeightSequence& w,
                                         double rel_tol = kDefaultTol) {
  Orthonormalization out;
  double max_norm = 0.0;
  for (const auto& v : vectors) max_norm = std::max(max_norm, norm(v, w));
  if (max_norm == 0.0) return out;
  const double drop = rel_tol * max_norm;

  for (std::size_t i = 0; i < vectors.size(); ++i) {
    Point r = vectors[i];
    std::vector<double> coef(vectors.size(), 0.0);
    coef[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < out.basis.size(); ++k) {
        const double c = inner_product(r, out.basis[k], w);
        r.axpy(-c, out.basis[k]);
        for (std::size_t t = 0; t < coef.size(); ++t) coef[t] -= c * out.coefficients[k][t];
      }
    }
    const double n = norm(r, w);
    if (n < drop) continue;
    r *= 1.0 / n;
    for (double& c : coef) c /= n;
    out.basis.push_back(std::move(r));
    out.coefficients.push_back(std::move(coef));
    out.source.push_back(i);
  }
  return out;
}

/// Span generated by explicit sample points.
struct SampleSpan {
  std::vector<Point> generators;
};

/// Span of a basic cylinder: every coordinate is free except the pinned ones.
struct CylinderSpan {
  std::vector<std::size_t> fixed;
};

/// An affine subspace through `base`. For a SampleSpan, `basis` is orthonormal
/// in <.,.>_a; a CylinderSpan is infinite-dimensional and is described by its
/// fixed coordinates instead (basis left empty).
struct AffineSpan {
  Point base;
  std::vector<Point> basis;
  std::variant<SampleSpan, CylinderSpan> provenance;

  bool is_cylinder_span() const { return std::holds_alternative<CylinderSpan>(provenance); }
};

inline AffineSpan span_from_samples(std::span<const Point> points, const Point& p, const WeightSequence& w,
                                    double tol = kDefaultTol) {
  std::vector<Point> diffs;
  diffs.reserve(points.size());
  for (const auto& x : points) diffs.push_back(x - p);
  auto ortho = orthonormalize(diffs, w, tol);
  return {p, std::move(ortho.basis), SampleSpan{std::vector<Point>(points.begin(), points.end())}};
}

/// GS(J, p) = { p + sum_{i in Lambda(J)} alpha_i e_i }.
inline AffineSpan span_of_cylinder(const BasicCylinder& j, const Point& p) {
  if (!contains_point(j, p)) throw PreconditionFailed("span_of_cylinder: base point is not in the cylinder");
  return {p, {}, CylinderSpan{lambda_set(j).excluded}};
}

struct SpanMembership {
  bool in_span = false;
  std::vector<double> coefficients;
  double residual = 0.0;
};

/// Coefficients of u - p against the span's orthonormal directions and the
/// norm of what is left over. For a cylinder span the directions are
/// (1/a_i) e_i over the free explicit coordinates, so the coefficient is
/// a_i (u_i - p_i) and the residual only sees the fixed coordinates.
inline SpanMembership span_membership(const AffineSpan& s, const Point& u, const WeightSequence& w,
                                      double tol = 1e-6) {
  SpanMembership out;
  const Point d = u - s.base;
  if (const auto* cyl = std::get_if<CylinderSpan>(&s.provenance)) {
    double sum = 0.0;
    for (std::size_t i : cyl->fixed) sum += w.squared(i) * d[i] * d[i];
    for (std::size_t i = 0; i < d.explicit_size(); ++i) {
      if (std::binary_search(cyl->fixed.begin(), cyl->fixed.end(), i)) continue;
      out.coefficients.push_back(w[i] * d[i]);
    }
    out.residual = std::sqrt(sum);
  } else {
    Point r = d;
    out.coefficients.assign(s.basis.size(), 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < s.basis.size(); ++k) {
        const double c = inner_product(r, s.basis[k], w);
        out.coefficients[k] += c;
        r.axpy(-c, s.basis[k]);
      }
    }
    out.residual = norm(r, w);
  }
  out.in_span = out.residual <= tol;
  return out;
}

}  // namespace hcube
