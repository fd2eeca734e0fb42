#pragma once

// JSON and CSV forms of the library types. Coordinate indices are 1-based in
// every serialized file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "hcube/covering.hpp"
#include "hcube/cylinder.hpp"
#include "hcube/errors.hpp"
#include "hcube/extension.hpp"
#include "hcube/isometry.hpp"
#include "hcube/measure.hpp"
#include "hcube/weighted_space.hpp"

namespace hcube {

using json = nlohmann::json;

namespace detail {

inline std::size_t coord_from_json(const json& j) {
  const auto i = j.get<long long>();
  if (i < 1) throw InvalidArgument("coordinate indices are 1-based");
  return static_cast<std::size_t>(i - 1);
}

}  // namespace detail

// ---- weights and points

inline json to_json(const WeightSequence& w) {
  return {{"prefix", w.prefix()}, {"tail_start", w.tail_start()}, {"tail_ratio", w.tail_ratio()}};
}
inline WeightSequence weights_from_json(const json& j) {
  return {j.value("prefix", std::vector<double>{}), j.at("tail_start").get<double>(), j.at("tail_ratio").get<double>()};
}

inline json to_json(const Point& p) { return {{"prefix", p.prefix()}, {"tail", p.tail()}}; }
inline Point point_from_json(const json& j) {
  return Point(j.value("prefix", std::vector<double>{}), j.value("tail", 0.0));
}

// ---- cylinders

inline const char* kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::left_anchored: return "left_anchored";
    case EdgeKind::interior: return "interior";
    case EdgeKind::right_anchored: return "right_anchored";
    case EdgeKind::singleton: return "singleton";
    case EdgeKind::full: return "full";
  }
  return "full";
}

inline json to_json(const Edge& e) {
  json j{{"kind", kind_name(e.kind())}};
  switch (e.kind()) {
    case EdgeKind::left_anchored: j["p2"] = e.p2(); break;
    case EdgeKind::interior: j["p1"] = e.p1(); j["p2"] = e.p2(); break;
    case EdgeKind::right_anchored:
    case EdgeKind::singleton: j["p1"] = e.p1(); break;
    case EdgeKind::full: break;
  }
  return j;
}

inline Edge edge_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "left_anchored") return Edge::left_anchored(j.at("p2").get<double>());
  if (kind == "interior") return Edge::interior(j.at("p1").get<double>(), j.at("p2").get<double>());
  if (kind == "right_anchored") return Edge::right_anchored(j.at("p1").get<double>());
  if (kind == "singleton") return Edge::singleton(j.at("p1").get<double>());
  if (kind == "full") return Edge::full();
  throw InvalidArgument("unknown edge kind '" + kind + "'");
}

inline json to_json(const BasicCylinder& c) {
  json coords = json::array();
  for (const auto& e : c.coords()) coords.push_back(to_json(e));
  return {{"coords", coords}};
}
inline BasicCylinder cylinder_from_json(const json& j) {
  std::vector<Edge> coords;
  for (const auto& e : j.at("coords")) coords.push_back(edge_from_json(e));
  return BasicCylinder(std::move(coords));
}

inline json to_json(const CylinderUnion& u) {
  json members = json::array();
  for (const auto& m : u.members) members.push_back(to_json(m));
  return {{"members", members}};
}
inline CylinderUnion union_from_json(const json& j) {
  CylinderUnion u;
  for (const auto& m : j.at("members")) u.members.push_back(cylinder_from_json(m));
  return u;
}

// ---- isometries

inline json to_json(const Generator& g) {
  return std::visit(
      [](const auto& gen) -> json {
        using T = std::decay_t<decltype(gen)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return {{"kind", "translation"}, {"c", to_json(gen.offset)}};
        } else if constexpr (std::is_same_v<T, Reflection>) {
          return {{"kind", "reflection"}, {"i", gen.coord + 1}};
        } else if constexpr (std::is_same_v<T, Permutation>) {
          json pairs = json::array();
          for (const auto& [from, to] : gen.sigma) pairs.push_back({from + 1, to + 1});
          return {{"kind", "permutation"}, {"sigma", pairs}};
        } else {
          return {{"kind", "rotation"}, {"i", gen.i + 1}, {"j", gen.j + 1}, {"theta", gen.theta}};
        }
      },
      g);
}

inline Generator generator_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "translation") return Translation{point_from_json(j.at("c"))};
  if (kind == "reflection") return Reflection{detail::coord_from_json(j.at("i"))};
  if (kind == "rotation")
    return Rotation{detail::coord_from_json(j.at("i")), detail::coord_from_json(j.at("j")), j.at("theta").get<double>()};
  if (kind == "permutation") {
    Permutation p;
    for (const auto& pair : j.at("sigma")) {
      if (!pair.is_array() || pair.size() != 2) throw InvalidArgument("permutation entries are [i, sigma(i)] pairs");
      p.sigma[detail::coord_from_json(pair[0])] = detail::coord_from_json(pair[1]);
    }
    return p;
  }
  throw InvalidArgument("unknown generator kind '" + kind + "'");
}

inline json to_json(const Isometry& f) {
  json gens = json::array();
  for (const auto& g : f.generators()) gens.push_back(to_json(g));
  return {{"p", to_json(f.base_in())}, {"q", to_json(f.base_out())}, {"gens", gens}};
}
inline Isometry isometry_from_json(const json& j) {
  std::vector<Generator> gens;
  for (const auto& g : j.value("gens", json::array())) gens.push_back(generator_from_json(g));
  return {point_from_json(j.value("p", json::object())), point_from_json(j.value("q", json::object())),
          std::move(gens)};
}

inline json to_json(const Cylinder& c) { return {{"source", to_json(c.source())}, {"map", to_json(c.map())}}; }

// ---- sampled maps

inline SampledMap sampled_map_from_json(const json& j) {
  SampledMap m;
  for (const auto& pair : j.at("pairs")) m.pairs.push_back({point_from_json(pair.at("x")), point_from_json(pair.at("y"))});
  m.base = j.value("base", std::size_t{0});
  if (m.base >= m.pairs.size()) throw InvalidArgument("base pair index out of range");
  return m;
}

// ---- reports

inline json to_json(const CheckReport& r) {
  json witness = json::object();
  if (!r.witness.empty()) {
    json idx = json::array();
    for (auto i : r.witness) idx.push_back(i);
    witness["indices"] = idx;
  }
  if (r.witness_point) witness["point"] = to_json(*r.witness_point);
  json j{{"pass", r.pass}, {"max_violation", r.max_violation}, {"witness", witness.empty() ? json() : witness}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

inline json to_json(const CoveringReport& r) {
  return {{"pass", r.pass},
          {"max_violation", r.misses == 0 ? 0.0 : static_cast<double>(r.misses)},
          {"witness", r.witness ? to_json(*r.witness) : json()},
          {"diameters_ok", r.diameters_ok},
          {"max_diameter", r.max_diameter},
          {"probes", r.probes},
          {"misses", r.misses}};
}

inline constexpr std::size_t kMaxSerializedCells = 10'000;

/// Cells are listed only for coverings of at most 10^4 cells.
inline json to_json(const Covering& c, const WeightSequence& w) {
  json j{{"target", {{"label", c.target.label},
                     {"members", to_json(CylinderUnion{c.target.members})["members"]},
                     {"map", to_json(c.target.map)}}},
         {"delta", c.delta},
         {"cell_count", c.cell_count()},
         {"total_volume", c.total_volume()},
         {"max_diameter", c.max_diameter(w)}};
  if (c.grid_m > 0) {
    j["n"] = c.grid_n;
    j["m"] = c.grid_m;
  }
  if (c.cell_count() <= static_cast<double>(kMaxSerializedCells)) {
    json cells = json::array();
    c.for_each_cell([&](const Cylinder& cell) { cells.push_back(to_json(cell)); });
    j["cells"] = cells;
  }
  return j;
}

inline json to_json(const MuBound& b) {
  json j{{"value", b.value}, {"strategy", b.strategy}, {"cells", b.cells}};
  j["restricted_grid"] = b.restricted_grid ? json(*b.restricted_grid) : json();
  j["refinement"] = b.refinement ? json(*b.refinement) : json();
  return j;
}

inline json to_json(const MeasureEstimate& e) {
  json rows = json::array();
  for (const auto& r : e.rows) {
    json row{{"delta", r.delta}};
    if (r.bound) row["upper"] = to_json(*r.bound);
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  return {{"pi", e.pi},
          {"rows", rows},
          {"best_upper", e.best_upper ? json(*e.best_upper) : json()},
          {"final_gap", e.final_gap},
          {"converged", e.converged}};
}

inline json to_json(const CubeMeasureReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"delta", row.delta},       {"n", row.n},
           {"m", row.m},               {"cells", row.cells},
           {"total_volume", row.total_volume}, {"max_diameter", row.max_diameter},
           {"probes", row.probes},     {"misses", row.misses},
           {"min_strategy_volume", row.min_strategy_volume}, {"pass", row.pass}};
    if (row.efficient_volume) j["efficient_volume"] = *row.efficient_volume;
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(j);
  }
  return {{"experiment", "cube_measure"}, {"pass", r.pass}, {"budget_error", r.budget_error}, {"rows", rows}};
}

inline json to_json(const InvarianceReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"delta", row.delta}, {"pi_E", row.pi_e}, {"upper_fE", row.upper_fe},
           {"upper_back", row.upper_back}, {"gap", row.gap}, {"pass", row.pass}};
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(j);
  }
  return {{"experiment", "invariance"},
          {"pass", r.pass},
          {"axis_preserving", r.axis_preserving},
          {"pi_E", r.pi_e},
          {"pi_fE", r.pi_fe ? json(*r.pi_fe) : json()},
          {"isometry_check", to_json(r.isometry_check)},
          {"gaps_non_increasing", r.gaps_non_increasing},
          {"final_gap", r.final_gap},
          {"rows", rows}};
}

// ---- CSV

/// Shortest round-trip decimal form, so CSV output is deterministic.
inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string cube_csv(const CubeMeasureReport& r) {
  std::string out = "delta,n,m,cells,total_volume,max_diameter\n";
  for (const auto& row : r.rows) {
    out += csv_number(row.delta) + "," + std::to_string(row.n) + "," + std::to_string(row.m) + "," +
           csv_number(row.cells) + "," + csv_number(row.total_volume) + "," + csv_number(row.max_diameter) + "\n";
  }
  return out;
}

inline std::string covering_csv(const Covering& c, const WeightSequence& w) {
  return "delta,n,m,cells,total_volume,max_diameter\n" + csv_number(c.delta) + "," + std::to_string(c.grid_n) + "," +
         std::to_string(c.grid_m) + "," + csv_number(c.cell_count()) + "," + csv_number(c.total_volume()) + "," +
         csv_number(c.max_diameter(w)) + "\n";
}

inline std::string invariance_csv(const InvarianceReport& r) {
  std::string out = "delta,pi_E,upper_fE,gap,pass\n";
  for (const auto& row : r.rows)
    out += csv_number(row.delta) + "," + csv_number(row.pi_e) + "," + csv_number(row.upper_fe) + "," +
           csv_number(row.gap) + "," + (row.pass ? "true" : "false") + "\n";
  return out;
}

// ---- files

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial report.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace hcube
