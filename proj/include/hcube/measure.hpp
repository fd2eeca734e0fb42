#pragma once

// Upper bounds on mu_delta(E) = inf { sum vol(C_i) : C_i in C_delta, E in U C_i }
// from the constructive coverings, and the experiments built on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcube/covering.hpp"
#include "hcube/cylinder.hpp"
#include "hcube/errors.hpp"
#include "hcube/extension.hpp"
#include "hcube/isometry.hpp"
#include "hcube/quasi_random.hpp"
#include "hcube/weighted_space.hpp"

namespace hcube {

/// Default delta schedule for experiments.
inline const std::vector<double> kDefaultSchedule{0.5, 0.3, 0.2, 0.1, 0.05};

/// f(E) leaves I^omega; `witness` is an image point outside the cube.
class EscapesCube : public Error {
 public:
  explicit EscapesCube(Point witness)
      : Error("isometric image leaves the Hilbert cube"), witness_(std::move(witness)) {}
  const Point& witness() const { return witness_; }

 private:
  Point witness_;
};

inline void check_schedule(std::span<const double> schedule) {
  if (schedule.empty()) throw InvalidArgument("schedule must not be empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0)) throw InvalidArgument("schedule entries must be positive");
    if (i > 0 && !(schedule[i] < schedule[i - 1])) throw InvalidArgument("schedule must be strictly decreasing");
  }
}

struct MuBound {
  double value = 0.0;
  std::string strategy;
  std::optional<double> restricted_grid;
  std::optional<double> refinement;
  double cells = 0.0;
};

/// Minimum total volume over the restricted-grid and member-refinement coverings of E.
inline MuBound mu_delta_upper(const CylinderUnion& e, double delta, const WeightSequence& w,
                              std::size_t budget = kDefaultCellBudget) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  MuBound b;
  std::optional<BudgetExceeded> failure;
  double grid_cells = 0.0;
  double refine_cells = 0.0;
  try {
    const auto c = restricted_grid_covering(e, w, delta, budget);
    b.restricted_grid = c.total_volume();
    grid_cells = c.cell_count();
  } catch (const BudgetExceeded& ex) {
    failure = ex;
  }
  try {
    const auto c = cover_image_union(e, Isometry::identity(), delta, w, budget);
    b.refinement = c.total_volume();
    refine_cells = c.cell_count();
  } catch (const BudgetExceeded& ex) {
    failure = ex;
  }
  if (!b.restricted_grid && !b.refinement) throw *failure;
  if (b.refinement && (!b.restricted_grid || *b.refinement <= *b.restricted_grid)) {
    b.value = *b.refinement;
    b.strategy = "refinement";
    b.cells = refine_cells;
  } else {
    b.value = *b.restricted_grid;
    b.strategy = "restricted_grid";
    b.cells = grid_cells;
  }
  return b;
}

struct DeltaEstimate {
  double delta = 0.0;
  std::optional<MuBound> bound;
  std::string error;
};

struct MeasureEstimate {
  std::vector<DeltaEstimate> rows;
  double pi = 0.0;
  std::optional<double> best_upper;
  std::optional<double> final_upper;
  double final_gap = 0.0;
  bool converged = false;
};

namespace detail {

/// Runs fn(delta) for every schedule entry on worker threads; results keep schedule order.
template <class Fn>
auto fan_out(std::span<const double> schedule, Fn fn) {
  using Result = decltype(fn(0.0));
  std::vector<std::future<Result>> futures;
  futures.reserve(schedule.size());
  for (double d : schedule) futures.push_back(std::async(std::launch::async, fn, d));
  std::vector<Result> out;
  out.reserve(futures.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace detail

/// mu_delta upper bounds along a decreasing schedule, compared with pi(E).
inline MeasureEstimate mu_estimate(const CylinderUnion& e, std::span<const double> schedule, const WeightSequence& w,
                                   std::size_t budget = kDefaultCellBudget, double gap_tol = 0.02) {
  check_schedule(schedule);
  MeasureEstimate est;
  est.pi = pi_measure(e);
  est.rows = detail::fan_out(schedule, [&](double delta) {
    DeltaEstimate row{delta, std::nullopt, {}};
    try {
      row.bound = mu_delta_upper(e, delta, w, budget);
    } catch (const BudgetExceeded& ex) {
      row.error = ex.what();
    }
    return row;
  });
  for (const auto& row : est.rows) {
    if (!row.bound) continue;
    est.best_upper = est.best_upper ? std::min(*est.best_upper, row.bound->value) : row.bound->value;
    est.final_upper = row.bound->value;
  }
  if (est.final_upper) {
    est.final_gap = *est.final_upper - est.pi;
    est.converged = est.final_gap <= gap_tol;
  }
  return est;
}

// ---------------------------------------------------------------- cube

struct CubeOptions {
  std::size_t budget = kDefaultCellBudget;
  std::size_t probes = 10'000;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  double epsilon = 0.05;
};

struct CubeRow {
  double delta = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  double cells = 0.0;
  double total_volume = 0.0;
  double max_diameter = 0.0;
  std::size_t probes = 0;
  std::size_t misses = 0;
  double min_strategy_volume = 0.0;
  std::optional<double> efficient_volume;
  bool pass = false;
  std::string error;
};

struct CubeMeasureReport {
  std::vector<CubeRow> rows;
  bool pass = false;
  bool budget_error = false;
};

/// Grid coverings of I^omega along the schedule: total volume 1, every cell
/// below delta, containment by probing. Also confirms that no implemented
/// strategy produces a covering of total volume below 1.
inline CubeMeasureReport cube_measure_experiment(const WeightSequence& w, std::span<const double> schedule,
                                                 const CubeOptions& opt = {}) {
  check_schedule(schedule);
  CubeMeasureReport report;
  report.rows = detail::fan_out(schedule, [&](double delta) {
    CubeRow row;
    row.delta = delta;
    try {
      const Covering grid = grid_covering(w, delta, opt.budget);
      row.n = grid.grid_n;
      row.m = grid.grid_m;
      row.cells = grid.cell_count();
      row.total_volume = grid.total_volume();
      const auto v = validate_covering(grid, opt.probes, w, opt.seed);
      row.max_diameter = v.max_diameter;
      row.probes = v.probes;
      row.misses = v.misses;

      const CylinderUnion cube{{BasicCylinder::cube()}};
      row.min_strategy_volume = row.total_volume;
      row.min_strategy_volume = std::min(row.min_strategy_volume, mu_delta_upper(cube, delta, w, opt.budget).value);
      try {
        const auto eff = efficient_covering(Cylinder(BasicCylinder::cube(), Isometry::identity()), delta,
                                            opt.epsilon, w, opt.budget);
        row.efficient_volume = eff.total_volume();
        row.min_strategy_volume = std::min(row.min_strategy_volume, *row.efficient_volume);
      } catch (const PreconditionFailed&) {
        // J* = I^omega is only a delta-cell when delta exceeds diam(I^omega).
      }
      row.pass = std::abs(row.total_volume - 1.0) <= opt.tol && v.diameters_ok && v.misses == 0 &&
                 row.min_strategy_volume >= 1.0 - 1e-9;
    } catch (const BudgetExceeded& ex) {
      row.error = ex.what();
    }
    return row;
  });
  report.pass = true;
  for (const auto& r : report.rows) {
    if (!r.error.empty()) report.budget_error = true;
    report.pass = report.pass && r.pass;
  }
  return report;
}

// ---------------------------------------------------------------- invariance

struct InvarianceOptions {
  double tol = 1e-12;
  double gap_target = 0.05;
  std::size_t probes = 0;  // containment probes per delta (0 = skip)
  std::size_t isometry_samples = 32;
  std::uint64_t seed = 1;
  std::size_t budget = kDefaultCellBudget;
};

struct InvarianceRow {
  double delta = 0.0;
  double pi_e = 0.0;
  double upper_fe = 0.0;
  double upper_back = 0.0;  // the same covering pulled back through f^{-1}, covering E
  double gap = 0.0;
  bool pass = false;
  std::string error;
};

struct InvarianceReport {
  bool axis_preserving = false;
  double pi_e = 0.0;
  std::optional<double> pi_fe;  // exact, axis-preserving maps only
  CheckReport isometry_check;
  std::vector<InvarianceRow> rows;
  bool gaps_non_increasing = true;
  double final_gap = 0.0;
  bool pass = false;
};

/// Throws EscapesCube unless f maps every member of E into I^omega.
inline void check_image_in_cube(const CylinderUnion& e, const Isometry& f, double tol = 1e-9) {
  for (const auto& j : e.members) {
    const Box b = j.box();
    const Box img = image_bounds(f, b);
    for (std::size_t i = 0; i < img.explicit_size(); ++i) {
      const Interval iv = img.edges[i];
      if (iv.lo >= -tol && iv.hi <= 1.0 + tol) continue;
      if (i >= std::max(f.support(), b.explicit_size())) {
        // Shifted tail coordinates.
        Point x = b.lower_corner().padded(i + 1);
        throw EscapesCube(f(x));
      }
      throw EscapesCube(f(extreme_preimage(f, b, i, iv.lo < -tol)));
    }
  }
}

/// Probes the distances between quasi-random points of E and their images.
inline CheckReport sampled_isometry_check(const CylinderUnion& e, const Isometry& f, const WeightSequence& w,
                                          std::size_t samples, std::uint64_t seed, double tol = 1e-9) {
  std::size_t dim = f.support();
  for (const auto& j : e.members) dim = std::max(dim, j.explicit_size());
  const HaltonSequence h(dim + 1, seed);
  std::vector<Point> xs;
  for (std::size_t i = 0; i < samples && !e.members.empty(); ++i) {
    const auto u = h.at(i);
    xs.push_back(detail::sample_member(e.members[i % e.members.size()], u));
  }
  return verify_isometry(sample_map(f, xs), w, tol);
}

/// pi(f(E)) = pi(E) for d_a-isometries f. Axis-preserving maps are compared
/// exactly; for rotations, refine-then-map coverings of f(E) give upper bounds
/// whose gap to pi(E) must shrink along the schedule and end below gap_target.
inline InvarianceReport invariance_experiment(const CylinderUnion& e, const Isometry& f,
                                              std::span<const double> schedule, const WeightSequence& w,
                                              const InvarianceOptions& opt = {}) {
  check_schedule(schedule);
  f.validate(w);
  check_image_in_cube(e, f);

  InvarianceReport rep;
  rep.axis_preserving = f.axis_preserving();
  rep.pi_e = pi_measure(e);
  rep.isometry_check = sampled_isometry_check(e, f, w, opt.isometry_samples, opt.seed);
  bool exact_ok = true;
  if (rep.axis_preserving) {
    CylinderUnion image;
    for (const auto& j : e.members) image.members.push_back(*image_cylinder(f, j, 1e-9));
    rep.pi_fe = pi_measure(image);
    exact_ok = std::abs(*rep.pi_fe - rep.pi_e) <= opt.tol;
  }

  const Isometry back = inverse(f);
  rep.rows = detail::fan_out(schedule, [&](double delta) {
    InvarianceRow row;
    row.delta = delta;
    row.pi_e = rep.pi_e;
    try {
      const Covering cov = cover_image_union(e, f, delta, w, opt.budget);
      row.upper_fe = cov.total_volume();
      const Covering pulled = map_covering(cov, back);
      row.upper_back = pulled.total_volume();
      row.gap = std::abs(row.upper_fe - rep.pi_e);
      row.pass = row.upper_fe >= rep.pi_e - opt.tol && row.upper_back >= rep.pi_e - opt.tol;
      if (opt.probes > 0) {
        row.pass = row.pass && validate_covering(cov, opt.probes, w, opt.seed).pass &&
                   validate_covering(pulled, opt.probes, w, opt.seed).pass;
      }
    } catch (const BudgetExceeded& ex) {
      row.error = ex.what();
    }
    return row;
  });

  bool rows_ok = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    rows_ok = rows_ok && rep.rows[i].pass;
    if (i > 0 && rep.rows[i].gap > rep.rows[i - 1].gap + opt.tol) rep.gaps_non_increasing = false;
  }
  rep.final_gap = rep.rows.empty() ? 0.0 : rep.rows.back().gap;
  rep.pass = exact_ok && rows_ok && rep.isometry_check.pass;
  if (!rep.axis_preserving) rep.pass = rep.pass && rep.gaps_non_increasing && rep.final_gap <= opt.gap_target;
  return rep;
}

}  // namespace hcube
