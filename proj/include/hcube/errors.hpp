#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hcube {

/// Default comparison tolerance for derived quantities (inner products, spans).
inline constexpr double kDefaultTol = 1e-9;

/// Tolerance on closed interval endpoints (membership, intersection, classification).
inline constexpr double kEndpointTol = 1e-12;

/// Default upper bound on the number of cells a covering may contain.
inline constexpr std::size_t kDefaultCellBudget = 10'000'000;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented type invariant (bad weights, bad interval, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A covering would need more cells than the configured budget allows.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string what, double required, std::size_t budget)
      : Error(std::move(what)), required_(required), budget_(budget) {}

  double required() const noexcept { return required_; }
  std::size_t budget() const noexcept { return budget_; }

 private:
  double required_;
  std::size_t budget_;
};

/// Rotation or permutation touches coordinates whose weights differ.
class IncompatibleWeights : public Error {
 public:
  using Error::Error;
};

/// An operation precondition does not hold (point outside its cylinder, cell too large, ...).
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace hcube
