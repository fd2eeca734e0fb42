#pragma once

// The weighted sequence space M_a: square-summable positive weights with a
// geometric tail, eventually-constant points, and the inner product
// <x, y>_a = sum_i a_i^2 x_i y_i with all infinite sums in closed form.
//
// Coordinates are 0-based throughout the C++ API. The JSON layer converts to
// the 1-based indices used in serialized files.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hcube/errors.hpp"

namespace hcube {

/// Closed-form remainders T(n) = sum_{i >= n} a_i^2 for a weight sequence with
/// an explicit prefix followed by a geometric tail.
class TailSumTable {
 public:
  TailSumTable() = default;

  TailSumTable(std::span<const double> prefix, double tail_start, double tail_ratio)
      : prefix_size_(prefix.size()),
        tail_start_sq_(tail_start * tail_start),
        ratio_sq_(tail_ratio * tail_ratio) {
    geometric_total_ = tail_start_sq_ / (1.0 - ratio_sq_);
    suffix_.assign(prefix.size() + 1, 0.0);
    suffix_[prefix.size()] = geometric_total_;
    for (std::size_t i = prefix.size(); i-- > 0;) {
      suffix_[i] = suffix_[i + 1] + prefix[i] * prefix[i];
    }
  }

  /// T(n): sum of a_i^2 over all coordinates i >= n.
  double remainder(std::size_t n) const {
    if (n <= prefix_size_) return suffix_[n];
    const auto k = static_cast<double>(n - prefix_size_);
    return geometric_total_ * std::pow(ratio_sq_, k);
  }

  double total() const { return remainder(0); }

  /// sum_{lo <= i < hi} a_i^2.
  double partial(std::size_t lo, std::size_t hi) const {
    if (hi <= lo) return 0.0;
    return remainder(lo) - remainder(hi);
  }

 private:
  std::size_t prefix_size_ = 0;
  double tail_start_sq_ = 0.0;
  double ratio_sq_ = 0.0;
  double geometric_total_ = 0.0;
  std::vector<double> suffix_;
};

/// Positive weights a = {a_i}: explicit a_0..a_{n-1}, then
/// a_{n+k} = tail_start * tail_ratio^k.
class WeightSequence {
 public:
  WeightSequence(std::vector<double> prefix, double tail_start, double tail_ratio)
      : prefix_(std::move(prefix)), tail_start_(tail_start), tail_ratio_(tail_ratio) {
    for (double a : prefix_) {
      if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("weights must be positive and finite");
    }
    if (!(tail_start_ > 0.0) || !std::isfinite(tail_start_))
      throw InvalidArgument("tail_start must be positive");
    if (!(tail_ratio_ > 0.0 && tail_ratio_ < 1.0)) throw InvalidArgument("tail_ratio must lie in (0, 1)");
    tails_ = TailSumTable(prefix_, tail_start_, tail_ratio_);
  }

  /// a_i = first * ratio^i for every i >= 0 (e.g. a_i = 2^{-i} in 1-based terms is geometric(0.5, 0.5)).
  static WeightSequence geometric(double first, double ratio) { return {{}, first, ratio}; }

  double operator[](std::size_t i) const {
    if (i < prefix_.size()) return prefix_[i];
    return tail_start_ * std::pow(tail_ratio_, static_cast<double>(i - prefix_.size()));
  }
  double squared(std::size_t i) const {
    const double a = (*this)[i];
    return a * a;
  }

  const std::vector<double>& prefix() const { return prefix_; }
  double tail_start() const { return tail_start_; }
  double tail_ratio() const { return tail_ratio_; }
  const TailSumTable& tails() const { return tails_; }

  /// Weights equal within relative 1e-12, the compatibility rule for permutations and rotations.
  bool same_weight(std::size_t i, std::size_t j) const {
    const double ai = (*this)[i];
    const double aj = (*this)[j];
    return std::abs(ai - aj) <= 1e-12 * std::max(ai, aj);
  }

 private:
  std::vector<double> prefix_;
  double tail_start_;
  double tail_ratio_;
  TailSumTable tails_;
};

/// An element of M_a: explicit x_0..x_{m-1}, then x_i = tail for all i >= m.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> prefix, double tail = 0.0) : prefix_(std::move(prefix)), tail_(tail) {}

  static Point constant(double c) { return Point({}, c); }
  static Point unit(std::size_t i) {
    std::vector<double> v(i + 1, 0.0);
    v[i] = 1.0;
    return Point(std::move(v), 0.0);
  }

  double operator[](std::size_t i) const { return i < prefix_.size() ? prefix_[i] : tail_; }
  std::size_t explicit_size() const { return prefix_.size(); }
  const std::vector<double>& prefix() const { return prefix_; }
  double tail() const { return tail_; }

  /// Same point with at least n explicit coordinates (padded with the tail value).
  Point padded(std::size_t n) const {
    if (n <= prefix_.size()) return *this;
    Point out = *this;
    out.prefix_.resize(n, tail_);
    return out;
  }

  void set(std::size_t i, double v) {
    if (i >= prefix_.size()) prefix_.resize(i + 1, tail_);
    prefix_[i] = v;
  }

  /// Every coordinate, including the tail, lies in [0, 1] (up to tol).
  bool in_cube(double tol = kEndpointTol) const {
    auto ok = [tol](double v) { return v >= -tol && v <= 1.0 + tol; };
    return ok(tail_) && std::all_of(prefix_.begin(), prefix_.end(), ok);
  }

  Point& operator+=(const Point& o) { return axpy(1.0, o); }
  Point& operator-=(const Point& o) { return axpy(-1.0, o); }
  Point& operator*=(double s) {
    for (double& v : prefix_) v *= s;
    tail_ *= s;
    return *this;
  }

  /// *this += s * o
  Point& axpy(double s, const Point& o) {
    const std::size_t n = std::max(prefix_.size(), o.prefix_.size());
    prefix_.resize(n, tail_);
    for (std::size_t i = 0; i < n; ++i) prefix_[i] += s * o[i];
    tail_ += s * o.tail_;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator-(Point a) { return a *= -1.0; }

  /// Coordinatewise equality after alignment.
  friend bool operator==(const Point& a, const Point& b) {
    const std::size_t n = std::max(a.prefix_.size(), b.prefix_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (a[i] != b[i]) return false;
    return a.tail_ == b.tail_;
  }

 private:
  std::vector<double> prefix_;
  double tail_ = 0.0;
};

/// <x, y>_a = sum_i a_i^2 x_i y_i; the constant tails are summed in closed form.
inline double inner_product(const Point& x, const Point& y, const WeightSequence& w) {
  const std::size_t n = std::max(x.explicit_size(), y.explicit_size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += w.squared(i) * x[i] * y[i];
  return sum + x.tail() * y.tail() * w.tails().remainder(n);
}

inline double norm(const Point& x, const WeightSequence& w) {
  return std::sqrt(std::max(0.0, inner_product(x, x, w)));
}

/// d_a(x, y). Computed from coordinate differences so that x == y gives exactly 0.
inline double distance(const Point& x, const Point& y, const WeightSequence& w) {
  const std::size_t n = std::max(x.explicit_size(), y.explicit_size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    sum += w.squared(i) * d * d;
  }
  const double dt = x.tail() - y.tail();
  return std::sqrt(sum + dt * dt * w.tails().remainder(n));
}

struct CombineTerm {
  double coefficient;
  Point point;
};

/// p + sum_k alpha_k (x_k - p), evaluated as (1 - sum alpha) p + sum alpha_k x_k.
inline Point point_combine(const Point& p, std::span<const CombineTerm> terms) {
  double weight_of_p = 1.0;
  for (const auto& t : terms) weight_of_p -= t.coefficient;
  Point out = weight_of_p * p;
  for (const auto& t : terms) out.axpy(t.coefficient, t.point);
  return out;
}

}  // namespace hcube
