#include <fstream>
#include <sstream>

#include "fraclap/error.hpp"
#include "fraclap/mesh.hpp"
#include "json.hpp"

namespace fraclap {

namespace {

using nlohmann::json;

json points_json(int dim, std::span<const Point> pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(dim == 1 ? json::array({p[0]}) : json::array({p[0], p[1]}));
  return arr;
}

json simplices_json(int dim, std::span<const Simplex> elems) {
  json arr = json::array();
  for (const auto& e : elems) {
    json s = json::array();
    for (int k = 0; k <= dim; ++k) s.push_back(e[k]);
    arr.push_back(std::move(s));
  }
  return arr;
}

std::vector<Point> points_from(int dim, const json& arr) {
  std::vector<Point> pts;
  for (const auto& p : arr) {
    if (!p.is_array() || static_cast<int>(p.size()) != dim) throw InputError("mesh JSON: bad vertex entry");
    pts.push_back({p[0].get<double>(), dim == 2 ? p[1].get<double>() : 0.0});
  }
  return pts;
}

std::vector<Simplex> simplices_from(int dim, const json& arr) {
  std::vector<Simplex> out;
  for (const auto& s : arr) {
    if (!s.is_array() || static_cast<int>(s.size()) != dim + 1) throw InputError("mesh JSON: bad element entry");
    Simplex e{0, 0, 0};
    for (int k = 0; k <= dim; ++k) e[k] = s[k].get<std::uint32_t>();
    out.push_back(e);
  }
  return out;
}

}  // namespace

std::string to_json(const Mesh& m) {
  json j;
  j["dim"] = m.dim();
  j["vertices"] = points_json(m.dim(), m.vertices());
  j["elements"] = simplices_json(m.dim(), m.elements());
  json b = json::array();
  for (auto f : m.boundary()) b.push_back(f ? 1 : 0);
  j["boundary"] = std::move(b);
  if (m.has_exterior()) {
    j["exterior_vertices"] = points_json(m.dim(), m.exterior_vertices());
    j["exterior_elements"] = simplices_json(m.dim(), m.exterior_elements());
  }
  return j.dump();
}

Mesh mesh_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("mesh JSON: ") + e.what());
  }
  for (const char* key : {"dim", "vertices", "elements", "boundary"})
    if (!j.contains(key)) throw InputError(std::string("mesh JSON: missing field ") + key);
  const int dim = j["dim"].get<int>();
  if (dim != 1 && dim != 2) throw InputError("mesh JSON: dim must be 1 or 2");
  std::vector<std::uint8_t> boundary;
  for (const auto& f : j["boundary"]) boundary.push_back(f.get<int>() != 0 ? 1 : 0);
  std::vector<Point> ext_v;
  std::vector<Simplex> ext_e;
  if (j.contains("exterior_vertices")) ext_v = points_from(dim, j["exterior_vertices"]);
  if (j.contains("exterior_elements")) ext_e = simplices_from(dim, j["exterior_elements"]);
  return Mesh(dim, points_from(dim, j["vertices"]), simplices_from(dim, j["elements"]), std::move(boundary),
              std::move(ext_v), std::move(ext_e));
}

void save_mesh(const std::string& path, const Mesh& m) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << to_json(m) << '\n';
}

Mesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return mesh_from_json(ss.str());
}

}  // namespace fraclap
