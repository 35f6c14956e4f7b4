#include "slipform/mesh_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slipform/error.hpp"

namespace slipform {

namespace {

using nlohmann::json;

json vec(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json &j) {
  if (!j.is_array() || j.size() != 2) throw Error(Errc::ParseError, "expected a pair of numbers");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json state(const ShearState &s) { return {{"theta", s.theta}, {"gamma", s.gamma}}; }

ShearState state_from(const json &j) {
  return {j.at("theta").get<double>(), j.at("gamma").get<double>()};
}

}  // namespace

std::string mesh_to_json(const PiecewiseAffineMap &map) {
  json cells = json::array();
  for (const Cell &c : map.cells) {
    json vertices = json::array();
    for (const Vec2 &v : c.vertices) vertices.push_back(vec(v));
    cells.push_back({{"vertices", vertices},
                     {"gradient", {c.gradient.a, c.gradient.b, c.gradient.c, c.gradient.d}},
                     {"offset", vec(c.offset)}});
  }
  json params = json::array();
  for (const auto &[name, value] : map.provenance.parameters) {
    params.push_back({{"name", name}, {"value", value}});
  }
  const json doc = {
      {"schema", kMeshSchema},
      {"slip", vec(map.slip.s())},
      {"window",
       {{"x_lo", map.window.x_lo}, {"x_hi", map.window.x_hi}, {"half_height", map.window.half_height}}},
      {"core", {map.core_lo, map.core_hi}},
      {"left_state", state(map.left_state)},
      {"right_state", state(map.right_state)},
      {"cells", cells},
      {"provenance", {{"builder", map.provenance.builder}, {"parameters", params}}},
  };
  return doc.dump(1) + "\n";
}

PiecewiseAffineMap mesh_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("schema").get<std::string>() != kMeshSchema) {
      throw Error(Errc::ParseError, "unsupported schema " + doc.at("schema").dump());
    }
    PiecewiseAffineMap map;
    const Vec2 s = vec_from(doc.at("slip"));
    map.slip = SlipSystem::from_direction(s);
    const json &w = doc.at("window");
    map.window = {w.at("x_lo").get<double>(), w.at("x_hi").get<double>(),
                  w.at("half_height").get<double>()};
    const Vec2 core = vec_from(doc.at("core"));
    map.core_lo = core.x;
    map.core_hi = core.y;
    map.left_state = state_from(doc.at("left_state"));
    map.right_state = state_from(doc.at("right_state"));
    for (const json &c : doc.at("cells")) {
      Cell cell;
      for (const json &v : c.at("vertices")) cell.vertices.push_back(vec_from(v));
      const json &g = c.at("gradient");
      if (!g.is_array() || g.size() != 4) throw Error(Errc::ParseError, "gradient needs 4 entries");
      cell.gradient = {g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>(),
                       g.at(3).get<double>()};
      cell.offset = vec_from(c.at("offset"));
      if (cell.vertices.size() < 3) throw Error(Errc::ParseError, "cell with fewer than 3 vertices");
      map.cells.push_back(std::move(cell));
    }
    const json &p = doc.at("provenance");
    map.provenance.builder = p.at("builder").get<std::string>();
    for (const json &kv : p.at("parameters")) {
      map.provenance.parameters.emplace_back(kv.at("name").get<std::string>(),
                                             kv.at("value").get<double>());
    }
    return map;
  } catch (const json::exception &e) {
    throw Error(Errc::ParseError, std::string("mesh document: ") + e.what());
  }
}

void write_mesh(const std::filesystem::path &path, const PiecewiseAffineMap &map) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ParseError, "cannot open " + path.string() + " for writing");
  out << mesh_to_json(map);
}

PiecewiseAffineMap read_mesh(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return mesh_from_json(buf.str());
}

}  // namespace slipform
