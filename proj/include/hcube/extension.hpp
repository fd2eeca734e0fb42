#pragma once

// Sampled maps between subsets of M_a, the checks that qualify them as
// d_a-isometries, and the extension operator F : GS(E1, p) -> M_a defined by
//   F(p + sum_i alpha_i (x_i - p)) = q + sum_i alpha_i (f(x_i) - q).
//
// F is evaluated through paired orthonormal bases: the domain differences
// x_i - p are orthonormalized while recording the combination coefficients,
// and the same coefficients applied to f(x_i) - q give the image basis. When
// the two Gram matrices agree the image basis is orthonormal as well.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcube/cylinder.hpp"
#include "hcube/errors.hpp"
#include "hcube/isometry.hpp"
#include "hcube/span.hpp"
#include "hcube/weighted_space.hpp"

namespace hcube {

struct SamplePair {
  Point x;
  Point y;
};

/// Finitely many pairs (x, f(x)); pairs[base] is the distinguished (p, q).
struct SampledMap {
  std::vector<SamplePair> pairs;
  std::size_t base = 0;

  const Point& p() const { return pairs.at(base).x; }
  const Point& q() const { return pairs.at(base).y; }
};

inline SampledMap sample_map(const Isometry& f, std::span<const Point> xs, std::size_t base = 0) {
  SampledMap m;
  m.base = base;
  m.pairs.reserve(xs.size());
  for (const auto& x : xs) m.pairs.push_back({x, f(x)});
  return m;
}

/// Outcome of a numerical check. `witness` names the offending sample indices
/// and `witness_point` the offending point, when there is one.
struct CheckReport {
  bool pass = true;
  double max_violation = 0.0;
  std::vector<std::size_t> witness;
  std::optional<Point> witness_point;
  std::string detail;

  void record(double violation, std::vector<std::size_t> where, double tol) {
    if (violation > max_violation) {
      max_violation = violation;
      witness = std::move(where);
    }
    if (violation > tol) pass = false;
  }
};

/// |d(y_i, y_j) - d(x_i, x_j)| <= tol over all pairs.
inline CheckReport verify_isometry(const SampledMap& m, const WeightSequence& w, double tol = 1e-12) {
  CheckReport r;
  for (std::size_t i = 0; i < m.pairs.size(); ++i)
    for (std::size_t j = i + 1; j < m.pairs.size(); ++j) {
      const double dx = distance(m.pairs[i].x, m.pairs[j].x, w);
      const double dy = distance(m.pairs[i].y, m.pairs[j].y, w);
      r.record(std::abs(dx - dy), {i, j}, tol);
    }
  return r;
}

/// <y_i - q, y_j - q> = <x_i - p, x_j - p> over all pairs (including i = j).
inline CheckReport gram_check(const SampledMap& m, const WeightSequence& w, double tol = kDefaultTol) {
  CheckReport r;
  const Point& p = m.p();
  const Point& q = m.q();
  std::vector<Point> dx, dy;
  for (const auto& s : m.pairs) {
    dx.push_back(s.x - p);
    dy.push_back(s.y - q);
  }
  for (std::size_t i = 0; i < m.pairs.size(); ++i)
    for (std::size_t j = i; j < m.pairs.size(); ++j) {
      const double gx = inner_product(dx[i], dx[j], w);
      const double gy = inner_product(dy[i], dy[j], w);
      r.record(std::abs(gx - gy), {i, j}, tol);
    }
  return r;
}

/// Thrown by extend() when the samples do not preserve the Gram matrix.
class GramCheckFailed : public Error {
 public:
  explicit GramCheckFailed(CheckReport report)
      : Error("gram check failed: max violation " + std::to_string(report.max_violation)),
        report_(std::move(report)) {}
  const CheckReport& report() const { return report_; }

 private:
  CheckReport report_;
};

struct ExtensionValue {
  Point value;
  std::vector<double> coefficients;
  double residual = 0.0;
  bool in_span = false;
};

class ExtensionOperator {
 public:
  ExtensionOperator(SampledMap samples, WeightSequence w, std::vector<Point> domain_basis,
                    std::vector<Point> image_basis, double tol)
      : samples_(std::move(samples)),
        w_(std::move(w)),
        domain_basis_(std::move(domain_basis)),
        image_basis_(std::move(image_basis)),
        tol_(tol) {}

  const Point& p() const { return samples_.p(); }
  const Point& q() const { return samples_.q(); }
  std::size_t rank() const { return domain_basis_.size(); }
  const std::vector<Point>& domain_basis() const { return domain_basis_; }
  const std::vector<Point>& image_basis() const { return image_basis_; }
  const SampledMap& samples() const { return samples_; }
  double tolerance() const { return tol_; }

  /// F(u) = q + sum_k <u - p, b_k> b'_k, with the distance of u from GS(E1, p).
  ExtensionValue evaluate(const Point& u) const {
    ExtensionValue out;
    AffineSpan s{p(), domain_basis_, SampleSpan{}};
    auto m = span_membership(s, u, w_, tol_);
    out.coefficients = std::move(m.coefficients);
    out.residual = m.residual;
    out.in_span = m.in_span;
    out.value = q();
    for (std::size_t k = 0; k < image_basis_.size(); ++k) out.value.axpy(out.coefficients[k], image_basis_[k]);
    return out;
  }

  /// F(u); throws PreconditionFailed when u is farther than tol from the span.
  Point operator()(const Point& u) const {
    auto v = evaluate(u);
    if (!v.in_span)
      throw PreconditionFailed("extension evaluated outside the generalized span (residual " +
                               std::to_string(v.residual) + ")");
    return std::move(v.value);
  }

  /// p + sum_i alpha_i (x_i - p).
  Point domain_point(std::span<const double> alpha) const { return combine_side(alpha, true); }

  /// q + sum_i alpha_i (y_i - q): the defining formula of F, bypassing the bases.
  Point combine(std::span<const double> alpha) const { return combine_side(alpha, false); }

 private:
  Point combine_side(std::span<const double> alpha, bool domain) const {
    if (alpha.size() != samples_.pairs.size()) throw InvalidArgument("one coefficient per sample is required");
    std::vector<CombineTerm> terms;
    terms.reserve(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i)
      terms.push_back({alpha[i], domain ? samples_.pairs[i].x : samples_.pairs[i].y});
    return point_combine(domain ? p() : q(), terms);
  }

  SampledMap samples_;
  WeightSequence w_;
  std::vector<Point> domain_basis_;
  std::vector<Point> image_basis_;
  double tol_;
};

inline ExtensionOperator extend(const SampledMap& m, const WeightSequence& w, double tol = kDefaultTol) {
  if (m.pairs.empty()) throw InvalidArgument("extend needs at least the base pair");
  auto gram = gram_check(m, w, tol);
  if (!gram.pass) throw GramCheckFailed(std::move(gram));

  std::vector<Point> dx, dy;
  for (const auto& s : m.pairs) {
    dx.push_back(s.x - m.p());
    dy.push_back(s.y - m.q());
  }
  auto domain = orthonormalize(dx, w, kDefaultTol);
  auto image_rank = orthonormalize(dy, w, kDefaultTol).basis.size();
  if (image_rank != domain.basis.size())
    throw Error("extend: domain and image spans have different numerical rank (" +
                std::to_string(domain.basis.size()) + " vs " + std::to_string(image_rank) + ")");

  std::vector<Point> image_basis;
  image_basis.reserve(domain.basis.size());
  for (const auto& coef : domain.coefficients) {
    Point b;
    for (std::size_t i = 0; i < coef.size(); ++i) b.axpy(coef[i], dy[i]);
    image_basis.push_back(std::move(b));
  }
  return ExtensionOperator(m, w, std::move(domain.basis), std::move(image_basis), tol);
}

/// Checks GS(E2, q) = F(GS(E1, p)) on `probes` random finite combinations:
/// F of a domain combination must lie in the span of the y's, and the image
/// combination with the same coefficients must be exactly that F value.
inline CheckReport image_span_check(const SampledMap& m, const ExtensionOperator& F, const WeightSequence& w,
                                    double tol = kDefaultTol, std::size_t probes = 100,
                                    std::uint64_t seed = 1) {
  CheckReport r;
  std::vector<Point> ys;
  for (const auto& s : m.pairs) ys.push_back(s.y);
  const AffineSpan image_span = span_from_samples(ys, m.q(), w);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> alpha(m.pairs.size());
  for (std::size_t t = 0; t < probes; ++t) {
    for (double& a : alpha) a = coef(rng);
    const Point u = F.domain_point(alpha);
    const auto fu = F.evaluate(u);
    const double into = span_membership(image_span, fu.value, w, tol).residual;
    const double onto = distance(F.combine(alpha), fu.value, w);
    r.record(std::max({into, onto, fu.residual}), {t}, tol);
  }
  return r;
}

/// Signed-permutation structure of an isometry's linear part on the first dim
/// coordinates: sigma[i] = j when e_i maps to +-e_j. Empty if not of that type.
inline std::vector<std::size_t> coordinate_permutation(const Isometry& h, std::size_t dim, double tol = 1e-12) {
  std::vector<std::size_t> sigma(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const Point img = h.linear(Point::unit(i)).padded(dim);
    if (std::abs(img.tail()) > tol) return {};
    std::optional<std::size_t> hit;
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = std::abs(img[j]);
      if (std::abs(v - 1.0) <= tol) {
        if (hit) return {};
        hit = j;
      } else if (v > tol) {
        return {};
      }
    }
    if (!hit) return {};
    sigma[i] = *hit;
  }
  return sigma;
}

/// Two descriptions K = f1(J1) = f2(J2) of the same cylinder must carry the
/// same elementary volume. When h = f2^{-1} o f1 permutes coordinates, also
/// checks the weighted edge identity a_i (x_i - u_i) = a_s(i) (y_s(i) - v_s(i))
/// and that h carries J1 onto J2.
inline CheckReport volume_well_defined_check(const BasicCylinder& j1, const BasicCylinder& j2, const Isometry& f1,
                                             const Isometry& f2, const WeightSequence& w, double tol = 1e-12) {
  CheckReport r;
  r.record(std::abs(volume(j1) - volume(j2)), {}, tol);

  const Isometry h = f1.then(inverse(f2));
  const std::size_t dim = std::max({h.support(), j1.explicit_size(), j2.explicit_size()});
  const auto sigma = coordinate_permutation(h, dim);
  if (sigma.empty()) {
    r.detail = "volumes only (map is not permutation-type)";
    return r;
  }
  const auto [u, x] = corners(j1.padded(dim));
  const auto [v, y] = corners(j2.padded(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t s = sigma[i];
    const double lhs = w[i] * (x[i] - u[i]);
    const double rhs = w[s] * (y[s] - v[s]);
    r.record(std::abs(lhs - rhs), {i, s}, tol);
  }

  const Box img = image_bounds(h, j1.box());
  for (std::size_t i = 0; i < std::max(img.explicit_size(), j2.explicit_size()); ++i) {
    const Interval a = img.edge(i);
    const Interval b = j2.edge(i).interval();
    r.record(std::max(std::abs(a.lo - b.lo), std::abs(a.hi - b.hi)), {i}, tol);
  }
  r.detail = "volumes, weighted edges and corner images";
  return r;
}

}  // namespace hcube
