// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Each line ends with the measured wall time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hcube/hcube.hpp"

using namespace hcube;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) summary = "first failure: " + what;
    pass = pass && ok;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

const Point kCentre = Point::constant(0.5);

// ---------------------------------------------------------------- generators

/// Non-degenerate basic cylinder on `dim` explicit coordinates, edge lengths in [min_len, max_len].
BasicCylinder random_box(std::mt19937_64& rng, std::size_t dim, double min_len, double max_len,
                         bool allow_full = true) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> coords;
  for (std::size_t i = 0; i < dim; ++i) {
    const auto kind = rng() % (allow_full ? 4 : 3);
    const double len = min_len + (max_len - min_len) * unit(rng);
    if (kind == 0) {
      coords.push_back(Edge::left_anchored(len));
    } else if (kind == 1) {
      coords.push_back(Edge::right_anchored(1.0 - len));
    } else if (kind == 2) {
      const double lo = 0.01 + (0.98 - len) * unit(rng);
      coords.push_back(Edge::interior(lo, lo + len));
    } else {
      coords.push_back(Edge::full());
    }
  }
  return BasicCylinder(std::move(coords));
}

/// Like random_box, but some coordinates are pinned.
BasicCylinder random_cylinder_with_pins(std::mt19937_64& rng, std::size_t dim, double pin_rate) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto j = random_box(rng, dim, 0.1, 0.9);
  std::vector<Edge> coords = j.coords();
  for (auto& e : coords)
    if (unit(rng) < pin_rate) e = Edge::singleton(unit(rng));
  return BasicCylinder(std::move(coords));
}

// ---------------------------------------------------------------- 1

Outcome cube_measure() {
  Outcome o;
  const WeightSequence w = WeightSequence::geometric(0.5, 0.5);
  CubeOptions opt;
  opt.probes = 10'000;
  const auto report = cube_measure_experiment(w, kDefaultSchedule, opt);
  double max_cells = 0.0;
  for (const auto& r : report.rows) {
    o.require(r.error.empty(), "delta " + fmt(r.delta) + ": " + r.error);
    o.require(std::abs(r.total_volume - 1.0) <= 1e-12, "total volume " + fmt(r.total_volume));
    o.require(r.max_diameter < r.delta, "cell diameter " + fmt(r.max_diameter) + " at delta " + fmt(r.delta));
    o.require(r.probes >= 10'000 && r.misses == 0, fmt(r.misses) + " uncovered probes at delta " + fmt(r.delta));
    o.require(r.min_strategy_volume >= 1.0 - 1e-9, "a strategy covered the cube with volume below 1");
    max_cells = std::max(max_cells, r.cells);
  }
  if (o.pass) o.summary = "5 deltas, sum vol = 1, up to " + fmt(max_cells) + " cells, 0 misses in 10^4 probes each";
  return o;
}

// ---------------------------------------------------------------- 2

/// Efficient-covering cell count, evaluated by counting translates k * b* that start at or
/// before the far end of each covered edge.
double translate_count(const BasicCylinder& j, double b) {
  double count = 1.0;
  for (auto a : covered_axes(j)) {
    const double len = j.edge(a).length();
    std::size_t k = 0;
    while (static_cast<double>(k + 1) * b <= len * (1.0 + 1e-12)) ++k;
    count *= static_cast<double>(k + 1);
  }
  return count;
}

Outcome efficient_covering_bound() {
  Outcome o;
  const WeightSequence w = WeightSequence::geometric(0.5, 0.5);
  std::mt19937_64 rng(7);
  double worst_excess = -1.0;
  double max_cells = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t dim = 1 + rng() % 6;
    const BasicCylinder j = random_box(rng, dim, 0.05, 0.5);
    const double vol = volume(j);
    for (double eps : {0.1, 0.01}) {
      const double delta = diameter(j, w) + 0.01;
      const auto c = efficient_covering(Cylinder(j, Isometry::identity()), delta, eps, w);
      const double b = c.groups.front().steps.empty() ? 1.0 : c.groups.front().steps.front();
      const double excess = c.total_volume() - vol;
      worst_excess = std::max(worst_excess, excess / eps);
      max_cells = std::max(max_cells, c.cell_count());
      o.require(c.total_volume() <= vol + eps + 1e-12, "volume " + fmt(c.total_volume()) + " > " + fmt(vol + eps));
      o.require(c.cell_count() <= translate_count(j, b), "cell count above the product formula");
      const auto v = validate_covering(c, 10'000, w, 1 + t);
      o.require(v.pass, "validation failed for cylinder " + fmt(t) + " eps " + fmt(eps));
    }
  }
  if (o.pass)
    o.summary = "100 coverings, max excess/eps " + fmt(worst_excess) + ", up to " + fmt(max_cells) + " cells";
  return o;
}

// ---------------------------------------------------------------- 3

WeightSequence paired_weights(std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = 0.5 / (1.0 + static_cast<double>(i / 2));
  return WeightSequence(std::move(a), 0.01, 0.5);
}

Outcome extension_operator() {
  Outcome o;
  const WeightSequence w = paired_weights(40);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double worst_sample = 0.0, worst_inner = 0.0, worst_decomp = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t dim = 2 + 2 * (rng() % 20);  // even, at most 40
    std::vector<Generator> gens;
    for (int g = 0; g < 6; ++g) {
      const std::size_t pair = 2 * (rng() % (dim / 2));
      switch (rng() % 4) {
        case 0: gens.push_back(Rotation{pair, pair + 1, 2 * std::numbers::pi * unit(rng)}); break;
        case 1: gens.push_back(Reflection{rng() % dim}); break;
        case 2: gens.push_back(Permutation{{{pair, pair + 1}, {pair + 1, pair}}}); break;
        default: {
          std::vector<double> c(dim);
          for (double& x : c) x = 0.2 * coef(rng);
          gens.push_back(Translation{Point(c)});
        }
      }
    }
    std::vector<double> pv(dim), qv(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      pv[i] = unit(rng);
      qv[i] = unit(rng);
    }
    const Isometry f(Point(pv, unit(rng)), Point(qv, unit(rng)), std::move(gens));
    f.validate(w);

    const std::size_t independent = 2 + rng() % 18;
    std::vector<Point> xs;
    for (std::size_t k = 0; k < independent; ++k) {
      std::vector<double> v(dim);
      for (double& x : v) x = unit(rng);
      xs.push_back(Point(v, unit(rng)));
    }
    // One dependent sample, so span points have two decompositions.
    std::vector<double> beta(independent, 0.0);
    for (std::size_t k = 1; k < independent; ++k) beta[k] = coef(rng);
    {
      std::vector<CombineTerm> terms;
      for (std::size_t k = 1; k < independent; ++k) terms.push_back({beta[k], xs[k]});
      xs.push_back(point_combine(xs[0], terms));
    }
    const auto m = sample_map(f, xs);
    const auto F = extend(m, w);

    for (const auto& s : m.pairs) worst_sample = std::max(worst_sample, distance(F(s.x), s.y, w));

    auto random_alpha = [&] {
      std::vector<double> a(xs.size(), 0.0);
      for (std::size_t k = 1; k < a.size(); ++k) a[k] = coef(rng);
      return a;
    };
    for (int pair = 0; pair < 100; ++pair) {
      const Point u = F.domain_point(random_alpha());
      const Point v = F.domain_point(random_alpha());
      const double before = inner_product(u - F.p(), v - F.p(), w);
      const double after = inner_product(F(u) - F.q(), F(v) - F.q(), w);
      worst_inner = std::max(worst_inner, std::abs(after - before));
    }
    for (int d = 0; d < 10; ++d) {
      auto a1 = random_alpha();
      auto a2 = a1;
      const double s = coef(rng);
      a2.back() += s;  // + s * (x_dep - p) ...
      for (std::size_t k = 1; k < independent; ++k) a2[k] -= s * beta[k];  // ... - s * sum beta_k (x_k - p)
      worst_decomp = std::max(worst_decomp, distance(F.combine(a1), F.combine(a2), w));
      worst_decomp = std::max(worst_decomp, distance(F(F.domain_point(a2)), F.combine(a1), w));
    }
  }
  o.require(worst_sample <= 1e-12, "sample reproduction error " + fmt(worst_sample));
  o.require(worst_inner <= 1e-9, "inner product error " + fmt(worst_inner));
  o.require(worst_decomp <= 1e-9, "decomposition disagreement " + fmt(worst_decomp));
  o.summary = (o.pass ? "" : o.summary + "; ") + "max errors: samples " + fmt(worst_sample) + ", inner products " +
              fmt(worst_inner) + ", decompositions " + fmt(worst_decomp);
  return o;
}

// ---------------------------------------------------------------- 4

Outcome cylinder_span() {
  Outcome o;
  const WeightSequence w = WeightSequence::geometric(0.5, 0.5);
  constexpr std::size_t kProbeDim = 8;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t agree = 0, total = 0, in_span = 0;
  for (int t = 0; t < 50; ++t) {
    const BasicCylinder j = random_cylinder_with_pins(rng, 1 + rng() % 6, 0.3).padded(kProbeDim);
    const auto [lower, upper] = corners(j);
    std::vector<Point> corner_set{lower};
    for (std::size_t i = 0; i < kProbeDim; ++i) {
      if (j.edge(i).is_singleton()) continue;
      Point c = lower;
      c.set(i, lower[i] + j.edge(i).length());
      corner_set.push_back(c);
    }
    const auto from_samples = span_from_samples(corner_set, lower, w);
    const auto from_cylinder = span_of_cylinder(j, lower);
    for (int q = 0; q < 100; ++q) {
      Point probe = lower;
      for (std::size_t i = 0; i < kProbeDim; ++i)
        if (!j.edge(i).is_singleton()) probe.set(i, 4.0 * unit(rng) - 2.0);
      if (q % 2 == 1) {
        // Push a pinned coordinate off its value, if there is one.
        for (std::size_t i = 0; i < kProbeDim; ++i)
          if (j.edge(i).is_singleton()) {
            probe.set(i, probe[i] + (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.01 + unit(rng)));
            break;
          }
      }
      const bool a = span_membership(from_samples, probe, w, 1e-6).in_span;
      const bool b = span_membership(from_cylinder, probe, w, 1e-6).in_span;
      agree += a == b ? 1 : 0;
      in_span += b ? 1 : 0;
      ++total;
    }
  }
  o.require(agree == total, fmt(static_cast<double>(total - agree)) + " disagreements");
  o.summary = (o.pass ? "" : o.summary + "; ") + "agreement " + fmt(static_cast<double>(agree)) + "/" +
              fmt(static_cast<double>(total)) + " (" + fmt(static_cast<double>(in_span)) + " in span)";
  return o;
}

// ---------------------------------------------------------------- 5

Outcome degenerate_null_sets() {
  Outcome o;
  const WeightSequence w = WeightSequence::geometric(0.5, 0.5);
  std::vector<CylinderUnion> sets;
  for (std::size_t i : {0u, 1u, 3u}) {
    for (double c : {0.0, 0.5, 1.0}) {
      std::vector<Edge> coords(i + 1, Edge::full());
      coords[i] = Edge::singleton(c);
      sets.push_back({{BasicCylinder(coords)}});
    }
  }
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    auto j = random_cylinder_with_pins(rng, 1 + rng() % 5, 0.0);
    std::vector<Edge> coords = j.coords();
    coords[rng() % coords.size()] = Edge::singleton(static_cast<double>(rng() % 1000) / 999.0);
    sets.push_back({{BasicCylinder(coords)}});
  }
  // Boundary of a cylinder: a union of slices.
  sets.push_back({{BasicCylinder({Edge::singleton(0.2), Edge::interior(0.3, 0.6)}),
                   BasicCylinder({Edge::singleton(0.7), Edge::interior(0.3, 0.6)}),
                   BasicCylinder({Edge::interior(0.2, 0.7), Edge::singleton(0.3)}),
                   BasicCylinder({Edge::interior(0.2, 0.7), Edge::singleton(0.6)})}});
  std::size_t evaluations = 0;
  for (const auto& e : sets) {
    for (double d : kDefaultSchedule) {
      const auto b = mu_delta_upper(e, d, w);
      o.require(b.value == 0.0, "upper bound " + fmt(b.value) + " at delta " + fmt(d));
      ++evaluations;
    }
  }
  if (o.pass) o.summary = fmt(static_cast<double>(sets.size())) + " sets x 5 deltas, every bound exactly 0";
  return o;
}

// ---------------------------------------------------------------- 6

Outcome invariance() {
  Outcome o;
  const WeightSequence w({0.5, 0.5, 0.5, 0.25, 0.25, 0.25}, 0.125, 0.5);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_exact = 0.0;
  for (int t = 0; t < 100; ++t) {
    CylinderUnion e;
    const std::size_t members = 1 + rng() % 5;
    for (std::size_t k = 0; k < members; ++k) e.members.push_back(random_box(rng, 1 + rng() % 6, 0.1, 0.7));

    std::vector<Generator> gens;
    for (int g = 0; g < 4; ++g) {
      if (rng() % 2 == 0) {
        gens.push_back(Reflection{rng() % 7});
      } else {
        const std::size_t block = 3 * (rng() % 2);
        std::vector<std::size_t> perm{0, 1, 2};
        std::shuffle(perm.begin(), perm.end(), rng);
        Permutation p;
        for (std::size_t i = 0; i < 3; ++i) p.sigma[block + i] = block + perm[i];
        gens.push_back(p);
      }
    }
    Isometry f(kCentre, kCentre, std::move(gens));
    // Translate within the slack left by the image's bounding box.
    std::vector<double> lo(6, 1.0), hi(6, 0.0);
    for (const auto& j : e.members) {
      const Box img = image_bounds(f, j.padded(6).box());
      for (std::size_t i = 0; i < 6; ++i) {
        lo[i] = std::min(lo[i], img.edge(i).lo);
        hi[i] = std::max(hi[i], img.edge(i).hi);
      }
    }
    std::vector<double> shift(6);
    for (std::size_t i = 0; i < 6; ++i) shift[i] = -lo[i] + (1.0 - hi[i] + lo[i]) * unit(rng);
    f = f.then(translation(Point(shift)));

    InvarianceOptions opt;
    opt.seed = 1 + t;
    // Six heavy coordinates put delta <= 0.1 beyond the cell budget; exactness is the point here.
    const auto r = invariance_experiment(e, f, std::vector<double>{0.5, 0.3, 0.2}, w, opt);
    o.require(r.pi_fe.has_value(), "no exact image measure");
    if (r.pi_fe) worst_exact = std::max(worst_exact, std::abs(*r.pi_fe - r.pi_e));
    o.require(r.pass, "axis-preserving case " + fmt(t) + " failed");
  }
  o.require(worst_exact <= 1e-12, "pi difference " + fmt(worst_exact));

  const json data = read_json_file(std::string(HCUBE_TEST_DATA) + "/rotation_gap_target.json");
  const double target = data.at("gap_target").get<double>();
  const WeightSequence rw = weights_from_json(data.at("weights"));
  const auto schedule = data.at("schedule").get<std::vector<double>>();
  double worst_final = 0.0;
  std::size_t rotations = 0;
  for (const auto& c : data.at("cases")) {
    InvarianceOptions opt;
    opt.gap_target = target;
    opt.probes = 200;
    const auto r = invariance_experiment(union_from_json(c.at("set")), isometry_from_json(c.at("isometry")),
                                         schedule, rw, opt);
    ++rotations;
    worst_final = std::max(worst_final, r.final_gap);
    o.require(!r.axis_preserving, "rotation case is axis-preserving");
    o.require(r.gaps_non_increasing, "gap grows along the schedule in rotation case " + fmt(rotations));
    o.require(r.final_gap <= target, "final gap " + fmt(r.final_gap) + " above target " + fmt(target));
    o.require(r.pass, "rotation case " + fmt(static_cast<double>(rotations)) + " failed");
  }
  o.require(rotations == 20, "expected 20 rotation cases");
  if (o.pass)
    o.summary = "100 axis-preserving maps (max |pi diff| " + fmt(worst_exact) + "), " + fmt(rotations) +
                " rotations (max final gap " + fmt(worst_final) + " <= target " + fmt(target) + ")";
  return o;
}

// ---------------------------------------------------------------- 7

Outcome volume_well_defined() {
  Outcome o;
  const WeightSequence w({0.5, 0.5, 0.5, 0.25, 0.25, 0.25}, 0.125, 0.5);
  std::mt19937_64 rng(23);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const BasicCylinder j1 = random_cylinder_with_pins(rng, 6, 0.1);
    auto block_perm = [&](std::size_t block) {
      std::vector<std::size_t> perm{0, 1, 2};
      std::shuffle(perm.begin(), perm.end(), rng);
      Permutation p;
      for (std::size_t i = 0; i < 3; ++i) p.sigma[block + i] = block + perm[i];
      return p;
    };
    const Isometry sigma(kCentre, kCentre, {block_perm(0), block_perm(3)});
    const BasicCylinder j2 = *image_cylinder(sigma, j1);
    // K = g(sigma(J1)) = g(J2) for a second axis-preserving map g.
    const Isometry g(kCentre, kCentre, {Reflection{rng() % 6}, block_perm(3 * (rng() % 2))});
    const auto r = volume_well_defined_check(j1, j2, sigma.then(g), g, w, 1e-12);
    worst = std::max(worst, r.max_violation);
    o.require(r.pass, "pair " + fmt(t) + ": violation " + fmt(r.max_violation));
    o.require(r.detail == "volumes, weighted edges and corner images", "pair " + fmt(t) + " not checked edgewise");
  }
  if (o.pass) o.summary = "50 pairs, max violation " + fmt(worst);
  return o;
}

// ---------------------------------------------------------------- 8

Outcome oracles() {
  Outcome o;
  double worst_tail = 0.0;
  const std::vector<WeightSequence> weights{WeightSequence::geometric(0.5, 0.5), WeightSequence({0.9, 0.1}, 0.3, 0.7),
                                            paired_weights(10), WeightSequence({0.2, 0.2, 0.2}, 0.05, 0.9)};
  for (const auto& w : weights) {
    for (std::size_t n = 0; n < 12; ++n) {
      // 200 explicit terms, added smallest first.
      double direct = 0.0;
      for (std::size_t i = n + 200; i-- > n;) direct += w.squared(i);
      const double closed = w.tails().remainder(n);
      worst_tail = std::max(worst_tail, std::abs(closed - direct));
    }
  }
  o.require(worst_tail <= 1e-12, "tail sum error " + fmt(worst_tail));

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_z = 0.0;
  for (int t = 0; t < 20; ++t) {
    CylinderUnion e;
    const std::size_t members = 1 + rng() % 5;
    for (std::size_t k = 0; k < members; ++k) e.members.push_back(random_box(rng, 1 + rng() % 4, 0.2, 0.8));
    const double exact = pi_measure(e);
    constexpr int kSamples = 1'000'000;
    int hits = 0;
    std::vector<double> x(4);
    for (int s = 0; s < kSamples; ++s) {
      for (double& v : x) v = unit(rng);
      for (const auto& j : e.members) {
        bool in = true;
        for (std::size_t i = 0; i < j.explicit_size() && in; ++i) in = j.edge(i).interval().contains(x[i], 0.0);
        if (in) {
          ++hits;
          break;
        }
      }
    }
    const double p = static_cast<double>(hits) / kSamples;
    const double se = std::sqrt(exact * (1.0 - exact) / kSamples);
    const double z = se > 0 ? std::abs(p - exact) / se : (p == exact ? 0.0 : 1e9);
    worst_z = std::max(worst_z, z);
  }
  o.require(worst_z <= 3.0, "Monte-Carlo deviation " + fmt(worst_z) + " standard errors");
  o.summary = (o.pass ? "" : o.summary + "; ") + "max tail error " + fmt(worst_tail) +
              ", max Monte-Carlo deviation " + fmt(worst_z) + " SE";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "cube measure", 30.0, cube_measure},
      {2, "efficient covering bound", 60.0, efficient_covering_bound},
      {3, "extension operator", 0.0, extension_operator},
      {4, "cylinder span", 0.0, cylinder_span},
      {5, "degenerate null sets", 0.0, degenerate_null_sets},
      {6, "isometry invariance", 300.0, invariance},
      {7, "volume well-definedness", 0.0, volume_well_defined},
      {8, "oracle checks", 0.0, oracles},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.summary = std::string("exception: ") + ex.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.pass = false;
      o.summary += " (over the " + fmt(c.limit_seconds) + " s limit)";
    }
    all = all && o.pass;
    std::printf("[%s] %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.summary.c_str(), secs);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
