// Command-line front end: runs the covering and measure experiments on JSON
// configurations and writes JSON or CSV reports.
//
// Exit codes: 0 success, 1 failed check, 2 cell budget exceeded,
// 3 isometric image leaves the cube, 4 invalid input.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcube/hcube.hpp"

namespace {

using namespace hcube;

enum Exit : int { kOk = 0, kCheckFailed = 1, kBudget = 2, kEscape = 3, kBadInput = 4 };

struct Common {
  std::string weights_file;
  std::string schedule = "0.5,0.3,0.2,0.1,0.05";
  std::size_t budget = kDefaultCellBudget;
  double tol_scale = 1.0;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::string out;

  WeightSequence weights() const {
    if (weights_file.empty()) return WeightSequence::geometric(0.5, 0.5);
    return weights_from_json(read_json_file(weights_file));
  }

  std::vector<double> parsed_schedule() const {
    std::vector<double> s;
    std::stringstream ss(schedule);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        s.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidArgument("schedule entry '" + item + "' is not a number");
      }
    }
    check_schedule(s);
    return s;
  }

  double tol(double base) const { return base * tol_scale; }

  void emit(const std::string& text) const {
    if (out.empty()) {
      std::cout << text;
      std::cout.flush();
    } else {
      write_atomically(out, text);
    }
  }
  void emit(const json& j) const { emit(j.dump(2) + "\n"); }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--weights", c.weights_file, "Weight sequence JSON {prefix, tail_start, tail_ratio}")
      ->check(CLI::ExistingFile);
  app->add_option("--schedule", c.schedule, "Comma-separated, strictly decreasing delta values")
      ->capture_default_str();
  app->add_option("--budget", c.budget, "Maximum number of cells per covering")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol_scale, "Factor applied to every default tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--format", c.format, "Report format")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--seed", c.seed, "Seed for probe sampling")->capture_default_str();
  app->add_option("--out", c.out, "Report file (written atomically); stdout when omitted");
}

/// Either generator form {p, q, gens} or an affine map {p, q, matrix}.
struct MapInput {
  std::optional<Isometry> isometry;
  std::optional<json> affine;
};

MapInput read_map(const std::string& path) {
  const json j = read_json_file(path);
  if (j.contains("matrix")) return {std::nullopt, j};
  return {isometry_from_json(j), std::nullopt};
}

/// x -> q + A (x - p) on the matrix's coordinates, identity elsewhere.
Point apply_affine(const json& a, const Point& x) {
  const Point p = point_from_json(a.value("p", json::object()));
  const Point q = point_from_json(a.value("q", json::object()));
  const auto rows = a.at("matrix").get<std::vector<std::vector<double>>>();
  const Point d = x - p;
  Point v = d;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < rows[r].size(); ++c) s += rows[r][c] * d[c];
    v.set(r, s);
  }
  return q + v;
}

/// Sample points of E: member corners plus quasi-random interior points.
std::vector<Point> sample_set(const CylinderUnion& e, std::size_t count, std::uint64_t seed, std::size_t dim) {
  std::vector<Point> xs;
  for (const auto& m : e.members) {
    auto [lo, hi] = corners(m.padded(dim));
    xs.push_back(lo);
    xs.push_back(hi);
  }
  const HaltonSequence h(dim + 1, seed);
  for (std::size_t i = 0; i < count && !e.members.empty(); ++i)
    xs.push_back(detail::sample_member(e.members[i % e.members.size()].padded(dim), h.at(i)));
  return xs;
}

// ---------------------------------------------------------------- cube-measure

int run_cube(const Common& c, std::size_t probes, double epsilon) {
  const auto w = c.weights();
  CubeOptions opt;
  opt.budget = c.budget;
  opt.probes = probes;
  opt.seed = c.seed;
  opt.tol = c.tol(1e-12);
  opt.epsilon = epsilon;
  const auto report = cube_measure_experiment(w, c.parsed_schedule(), opt);
  c.emit(c.format == "csv" ? cube_csv(report) : to_json(report).dump(2) + "\n");
  if (report.budget_error) {
    for (const auto& r : report.rows)
      if (!r.error.empty()) std::cerr << "delta " << r.delta << ": " << r.error << "\n";
    return kBudget;
  }
  return report.pass ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- invariance

int run_invariance(const Common& c, const std::string& set_file, const std::string& map_file, double gap_target,
                   std::size_t probes, std::size_t samples) {
  const auto w = c.weights();
  const CylinderUnion e = union_from_json(read_json_file(set_file));
  const MapInput map = read_map(map_file);

  if (map.affine) {
    std::size_t dim = map.affine->at("matrix").size();
    for (const auto& m : e.members) dim = std::max(dim, m.explicit_size());
    SampledMap sm;
    for (const auto& x : sample_set(e, samples, c.seed, dim)) sm.pairs.push_back({x, apply_affine(*map.affine, x)});
    const auto gram = gram_check(sm, w, c.tol(kDefaultTol));
    json report{{"experiment", "invariance"}, {"pass", false}, {"gram_check", to_json(gram)}};
    if (gram.pass) {
      report["error"] = "affine maps are accepted only for the Gram check; give the isometry as generators";
      c.emit(report);
      std::cerr << "invariance: map passes the Gram check but is not given by generators\n";
      return kCheckFailed;
    }
    c.emit(report);
    std::cerr << "invariance: map is not a d_a-isometry, max Gram violation " << gram.max_violation << "\n";
    return kCheckFailed;
  }

  InvarianceOptions opt;
  opt.tol = c.tol(1e-12);
  opt.gap_target = gap_target;
  opt.probes = probes;
  opt.isometry_samples = samples;
  opt.seed = c.seed;
  opt.budget = c.budget;
  try {
    const auto report = invariance_experiment(e, *map.isometry, c.parsed_schedule(), w, opt);
    c.emit(c.format == "csv" ? invariance_csv(report) : to_json(report).dump(2) + "\n");
    bool budget = false;
    for (const auto& r : report.rows)
      if (!r.error.empty()) {
        budget = true;
        std::cerr << "delta " << r.delta << ": " << r.error << "\n";
      }
    if (budget) return kBudget;
    return report.pass ? kOk : kCheckFailed;
  } catch (const EscapesCube& ex) {
    c.emit(json{{"experiment", "invariance"},
                {"pass", false},
                {"error", ex.what()},
                {"witness", to_json(ex.witness())}});
    std::cerr << "invariance: " << ex.what() << "\n";
    return kEscape;
  } catch (const IncompatibleWeights& ex) {
    c.emit(json{{"experiment", "invariance"}, {"pass", false}, {"error", ex.what()}});
    std::cerr << "invariance: " << ex.what() << "\n";
    return kCheckFailed;
  }
}

// ---------------------------------------------------------------- extend

SampledMap read_samples(const std::string& path) {
  const json j = read_json_file(path);
  if (j.contains("pairs")) return sampled_map_from_json(j);
  // {"isometry": {...}, "points": [...], "base": k}
  std::vector<Point> xs;
  for (const auto& p : j.at("points")) xs.push_back(point_from_json(p));
  const auto base = j.value("base", std::size_t{0});
  if (base >= xs.size()) throw InvalidArgument("base index out of range");
  return sample_map(isometry_from_json(j.at("isometry")), xs, base);
}

std::vector<Point> read_points(const std::string& path, const char* key) {
  const json j = read_json_file(path);
  const json& list = j.is_array() ? j : j.at(key);
  std::vector<Point> out;
  for (const auto& p : list) out.push_back(point_from_json(p));
  return out;
}

int run_extend(const Common& c, const std::string& samples_file, const std::string& queries_file) {
  const auto w = c.weights();
  const SampledMap m = read_samples(samples_file);
  const auto queries = read_points(queries_file, "queries");
  const double tol = c.tol(1e-6);
  try {
    const auto F = extend(m, w, c.tol(kDefaultTol));
    json values = json::array();
    json rejected = json::array();
    std::string csv = "query,in_span,residual\n";
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto v = F.evaluate(queries[i]);
      const bool in_span = v.residual <= tol;
      csv += std::to_string(i + 1) + "," + (in_span ? "true" : "false") + "," + csv_number(v.residual) + "\n";
      if (in_span) {
        values.push_back({{"query", i + 1}, {"value", to_json(v.value)}, {"residual", v.residual}});
      } else {
        rejected.push_back({{"query", i + 1}, {"residual", v.residual}});
      }
    }
    c.emit(c.format == "csv" ? csv
                             : json{{"rank", F.rank()}, {"values", values}, {"rejected", rejected}}.dump(2) + "\n");
    if (!rejected.empty()) {
      std::cerr << "extend: " << rejected.size() << " queries lie outside the generalized span\n";
      return kCheckFailed;
    }
    return kOk;
  } catch (const GramCheckFailed& ex) {
    c.emit(json{{"gram_check", to_json(ex.report())}});
    std::cerr << "extend: " << ex.what() << "\n";
    return kCheckFailed;
  }
}

// ---------------------------------------------------------------- cover

int run_cover(const Common& c, const std::string& strategy, double delta, double epsilon, const std::string& set_file,
              const std::string& map_file, std::size_t probes) {
  const auto w = c.weights();
  const Isometry f = map_file.empty() ? Isometry::identity() : isometry_from_json(read_json_file(map_file));
  f.validate(w);
  CylinderUnion e{{BasicCylinder::cube()}};
  if (!set_file.empty()) e = union_from_json(read_json_file(set_file));

  Covering cov;
  if (strategy == "grid") {
    cov = grid_covering(w, delta, c.budget);
  } else if (strategy == "restricted") {
    cov = restricted_grid_covering(e, w, delta, c.budget);
  } else if (strategy == "efficient") {
    if (e.members.size() != 1) throw InvalidArgument("the efficient strategy covers a single cylinder");
    cov = efficient_covering(Cylinder(e.members[0], f), delta, epsilon, w, c.budget);
  } else {
    cov = cover_image_union(e, f, delta, w, c.budget);
  }
  const auto v = validate_covering(cov, probes, w, c.seed, c.tol(kDefaultTol));
  if (c.format == "csv") {
    c.emit(covering_csv(cov, w));
  } else {
    json j = to_json(cov, w);
    j["strategy"] = strategy;
    j["validation"] = to_json(v);
    c.emit(j);
  }
  return v.pass ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- span

int run_span(const Common& c, const std::string& points_file, const std::string& cylinder_file,
             const std::string& base_file, const std::string& queries_file) {
  const auto w = c.weights();
  std::optional<AffineSpan> s;
  if (!cylinder_file.empty()) {
    const auto j = cylinder_from_json(read_json_file(cylinder_file));
    Point base = corners(j).first;
    if (!base_file.empty()) base = point_from_json(read_json_file(base_file));
    s = span_of_cylinder(j, base);
  } else {
    const json j = read_json_file(points_file);
    std::vector<Point> pts;
    for (const auto& p : j.at("points")) pts.push_back(point_from_json(p));
    if (pts.empty()) throw InvalidArgument("at least one point is required");
    const auto base = j.value("base", std::size_t{0});
    if (base >= pts.size()) throw InvalidArgument("base index out of range");
    s = span_from_samples(pts, pts[base], w, c.tol(kDefaultTol));
  }
  const double tol = c.tol(1e-6);
  json rows = json::array();
  std::string csv = "query,in_span,residual\n";
  const auto queries = read_points(queries_file, "queries");
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto m = span_membership(*s, queries[i], w, tol);
    rows.push_back({{"query", i + 1}, {"in_span", m.in_span}, {"residual", m.residual}, {"coefficients", m.coefficients}});
    csv += std::to_string(i + 1) + "," + (m.in_span ? "true" : "false") + "," + csv_number(m.residual) + "\n";
  }
  json out{{"kind", s->is_cylinder_span() ? "cylinder" : "samples"}, {"queries", rows}};
  if (!s->is_cylinder_span()) out["dimension"] = s->basis.size();
  c.emit(c.format == "csv" ? csv : out.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverings, measures and isometries of the weighted Hilbert cube"};
  app.require_subcommand(1);
  Common common;

  auto* cube = app.add_subcommand("cube-measure", "Grid coverings of the whole cube along the schedule");
  add_common(cube, common);
  std::size_t cube_probes = 10'000;
  double cube_epsilon = 0.05;
  cube->add_option("--probes", cube_probes, "Containment probes per covering")->capture_default_str();
  cube->add_option("--epsilon", cube_epsilon, "Excess allowed for the efficient strategy")->capture_default_str();

  auto* inv = app.add_subcommand("invariance", "Compare the measure of a set and of its isometric image");
  add_common(inv, common);
  std::string inv_set, inv_map;
  double gap_target = 0.05;
  std::size_t inv_probes = 0, inv_samples = 32;
  inv->add_option("--set", inv_set, "Cylinder union JSON")->required()->check(CLI::ExistingFile);
  inv->add_option("--isometry", inv_map, "Isometry JSON (generators or affine matrix)")
      ->required()
      ->check(CLI::ExistingFile);
  inv->add_option("--gap-target", gap_target, "Largest admissible final gap for rotations")->capture_default_str();
  inv->add_option("--probes", inv_probes, "Containment probes per covering (0 skips)")->capture_default_str();
  inv->add_option("--samples", inv_samples, "Sample points for the isometry check")->capture_default_str();

  auto* ext = app.add_subcommand("extend", "Evaluate the extension of a sampled isometry");
  add_common(ext, common);
  std::string ext_samples, ext_queries;
  ext->add_option("--samples", ext_samples, "Sample pairs JSON")->required()->check(CLI::ExistingFile);
  ext->add_option("--queries", ext_queries, "Query points JSON")->required()->check(CLI::ExistingFile);

  auto* cov = app.add_subcommand("cover", "Build and validate one covering");
  add_common(cov, common);
  std::string strategy = "grid", cov_set, cov_map;
  double delta = 0.3, epsilon = 0.05;
  std::size_t cov_probes = 10'000;
  cov->add_option("--strategy", strategy, "Covering construction")
      ->capture_default_str()
      ->check(CLI::IsMember({"grid", "restricted", "efficient", "image"}));
  cov->add_option("--delta", delta, "Cell diameter bound")->capture_default_str()->check(CLI::PositiveNumber);
  cov->add_option("--epsilon", epsilon, "Excess for the efficient strategy")->capture_default_str();
  cov->add_option("--set", cov_set, "Cylinder union JSON (default: the cube)")->check(CLI::ExistingFile);
  cov->add_option("--isometry", cov_map, "Isometry JSON applied to the set")->check(CLI::ExistingFile);
  cov->add_option("--probes", cov_probes, "Containment probes")->capture_default_str();

  auto* spn = app.add_subcommand("span", "Membership in a generalized span");
  add_common(spn, common);
  std::string span_points, span_cyl, span_base, span_queries;
  auto* pts_opt = spn->add_option("--points", span_points, "Points JSON {points, base}")->check(CLI::ExistingFile);
  auto* cyl_opt = spn->add_option("--cylinder", span_cyl, "Basic cylinder JSON")->check(CLI::ExistingFile);
  spn->add_option("--base", span_base, "Base point JSON for --cylinder (default: lower corner)")
      ->check(CLI::ExistingFile)
      ->needs(cyl_opt);
  pts_opt->excludes(cyl_opt);
  spn->add_option("--queries", span_queries, "Query points JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*cube) return run_cube(common, cube_probes, cube_epsilon);
    if (*inv) return run_invariance(common, inv_set, inv_map, gap_target, inv_probes, inv_samples);
    if (*ext) return run_extend(common, ext_samples, ext_queries);
    if (*cov) return run_cover(common, strategy, delta, epsilon, cov_set, cov_map, cov_probes);
    if (*spn) {
      if (span_points.empty() && span_cyl.empty()) throw InvalidArgument("span needs --points or --cylinder");
      return run_span(common, span_points, span_cyl, span_base, span_queries);
    }
  } catch (const BudgetExceeded& ex) {
    std::cerr << "budget exceeded: " << ex.what() << "\n";
    return kBudget;
  } catch (const IncompatibleWeights& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kCheckFailed;
  } catch (const PreconditionFailed& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kCheckFailed;
  } catch (const InvalidArgument& ex) {
    std::cerr << "invalid input: " << ex.what() << "\n";
    return kBadInput;
  } catch (const json::exception& ex) {
    std::cerr << "invalid input: " << ex.what() << "\n";
    return kBadInput;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kCheckFailed;
  }
  return kOk;
}
