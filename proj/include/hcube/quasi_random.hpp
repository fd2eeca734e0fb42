#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace hcube {

/// Randomly shifted Halton sequence in [0, 1)^dim. The shift is drawn once from
/// the seed, so a fixed seed always reproduces the same points.
class HaltonSequence {
 public:
  HaltonSequence(std::size_t dim, std::uint64_t seed) : bases_(first_primes(dim)), shift_(dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& s : shift_) s = u(rng);
  }

  std::size_t dim() const { return bases_.size(); }

  /// Point number `index` (0-based).
  std::vector<double> at(std::uint64_t index) const {
    std::vector<double> out(bases_.size());
    for (std::size_t d = 0; d < bases_.size(); ++d) {
      const double v = radical_inverse(index + 1, bases_[d]) + shift_[d];
      out[d] = v - std::floor(v);
    }
    return out;
  }

 private:
  static double radical_inverse(std::uint64_t n, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (n > 0) {
      r += f * static_cast<double>(n % base);
      n /= base;
      f *= inv;
    }
    return r;
  }

  static std::vector<std::uint64_t> first_primes(std::size_t count) {
    std::vector<std::uint64_t> primes;
    for (std::uint64_t c = 2; primes.size() < count; ++c) {
      bool prime = true;
      for (auto p : primes) {
        if (p * p > c) break;
        if (c % p == 0) {
          prime = false;
          break;
        }
      }
      if (prime) primes.push_back(c);
    }
    return primes;
  }

  std::vector<std::uint64_t> bases_;
  std::vector<double> shift_;
};

}  // namespace hcube
