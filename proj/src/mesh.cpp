#include "fraclap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <unordered_map>

#include "fraclap/error.hpp"

namespace fraclap {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

/// Facets of `elements` that belong to exactly one element, oriented with
/// the element on the left.
std::vector<std::array<std::uint32_t, 2>> free_facets(int dim, std::span<const Simplex> elements,
                                                      const std::function<const Point&(std::size_t)>& point) {
  std::vector<std::array<std::uint32_t, 2>> out;
  if (dim == 1) {
    std::map<std::uint32_t, int> count;
    for (const auto& e : elements) {
      ++count[e[0]];
      ++count[e[1]];
    }
    for (auto [v, c] : count)
      if (c == 1) out.push_back({v, v});
    return out;
  }
  std::map<std::uint64_t, std::pair<int, std::array<std::uint32_t, 2>>> count;
  for (const auto& e : elements) {
    const bool ccw = signed_area(point(e[0]), point(e[1]), point(e[2])) > 0.0;
    for (int k = 0; k < 3; ++k) {
      std::uint32_t a = e[k], b = e[(k + 1) % 3];
      if (!ccw) std::swap(a, b);
      auto& slot = count[edge_key(a, b)];
      ++slot.first;
      slot.second = {a, b};
    }
  }
  for (const auto& [key, val] : count)
    if (val.first == 1) out.push_back(val.second);
  return out;
}

std::vector<std::uint8_t> boundary_flags(int dim, std::size_t nv, std::span<const Simplex> elements,
                                         std::span<const Point> vertices) {
  std::vector<std::uint8_t> flag(nv, 0);
  auto point = [&](std::size_t id) -> const Point& { return vertices[id]; };
  for (const auto& f : free_facets(dim, elements, point)) {
    flag[f[0]] = 1;
    flag[f[1]] = 1;
  }
  return flag;
}

/// Structured triangulation of lattice cells [lo, hi)^2 with spacing 1/ndiv.
/// classify(i, j) returns 0 (no cell), 1 (domain) or 2 (exterior layer).
Mesh lattice_mesh(int lo, int hi, std::size_t ndiv, const std::function<int(int, int)>& classify) {
  const int width = hi - lo + 1;
  auto lattice_id = [&](int i, int j) { return static_cast<std::size_t>((j - lo) * width + (i - lo)); };
  std::vector<int> use(static_cast<std::size_t>(width * width), 0);
  for (int j = lo; j < hi; ++j)
    for (int i = lo; i < hi; ++i) {
      const int kind = classify(i, j);
      if (kind == 0) continue;
      for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di) {
          int& u = use[lattice_id(i + di, j + dj)];
          u = (u == 1 || kind == 1) ? 1 : 2;
        }
    }
  std::vector<std::int64_t> id(use.size(), -1);
  std::vector<Point> verts, ext_verts;
  const double nd = static_cast<double>(ndiv);
  for (int pass = 1; pass <= 2; ++pass)
    for (int j = lo; j <= hi; ++j)
      for (int i = lo; i <= hi; ++i) {
        const std::size_t l = lattice_id(i, j);
        if (use[l] != pass) continue;
        auto& list = pass == 1 ? verts : ext_verts;
        id[l] = static_cast<std::int64_t>(list.size());
        list.push_back({i / nd, j / nd});
      }
  const auto nv = static_cast<std::int64_t>(verts.size());
  for (std::size_t l = 0; l < use.size(); ++l)
    if (use[l] == 2) id[l] += nv;

  std::vector<Simplex> elems, ext_elems;
  for (int j = lo; j < hi; ++j)
    for (int i = lo; i < hi; ++i) {
      const int kind = classify(i, j);
      if (kind == 0) continue;
      auto v = [&](int di, int dj) { return static_cast<std::uint32_t>(id[lattice_id(i + di, j + dj)]); };
      auto& list = kind == 1 ? elems : ext_elems;
      list.push_back({v(0, 0), v(1, 0), v(1, 1)});
      list.push_back({v(0, 0), v(1, 1), v(0, 1)});
    }
  auto flags = boundary_flags(2, verts.size(), elems, verts);
  return Mesh(2, std::move(verts), std::move(elems), std::move(flags), std::move(ext_verts), std::move(ext_elems));
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Point> vertices, std::vector<Simplex> elements, std::vector<std::uint8_t> boundary,
           std::vector<Point> exterior_vertices, std::vector<Simplex> exterior_elements)
    : dim_(dim),
      vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      boundary_(std::move(boundary)),
      exterior_vertices_(std::move(exterior_vertices)),
      exterior_elements_(std::move(exterior_elements)) {
  if (dim_ != 1 && dim_ != 2) throw InputError("Mesh: dimension must be 1 or 2");
  if (boundary_.size() != vertices_.size()) throw InputError("Mesh: boundary flag count differs from vertex count");
  const std::size_t nv = vertices_.size();
  for (const auto& e : elements_)
    for (int k = 0; k <= dim_; ++k)
      if (e[k] >= nv) throw InputError("Mesh: element references unknown vertex");
  const std::size_t ntotal = nv + exterior_vertices_.size();
  for (const auto& e : exterior_elements_)
    for (int k = 0; k <= dim_; ++k)
      if (e[k] >= ntotal) throw InputError("Mesh: exterior element references unknown vertex");
  for (auto& e : elements_)
    for (int k = dim_ + 1; k < 3; ++k) e[k] = 0;
  for (auto& e : exterior_elements_)
    for (int k = dim_ + 1; k < 3; ++k) e[k] = 0;
  if (dim_ == 1) {
    for (auto& p : vertices_) p[1] = 0.0;
    for (auto& p : exterior_vertices_) p[1] = 0.0;
  }

  dof_of_vertex_.assign(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    if (boundary_[v]) continue;
    dof_of_vertex_[v] = static_cast<std::int64_t>(vertex_of_dof_.size());
    vertex_of_dof_.push_back(v);
  }
  for (const auto& e : elements_)
    for (int a = 0; a <= dim_; ++a)
      for (int b = a + 1; b <= dim_; ++b) h_ = std::max(h_, std::sqrt(dist2(vertices_[e[a]], vertices_[e[b]])));
}

std::optional<std::size_t> Mesh::dof_of_vertex(std::size_t v) const {
  if (v >= dof_of_vertex_.size()) throw InputError("Mesh: unknown vertex");
  if (dof_of_vertex_[v] < 0) return std::nullopt;
  return static_cast<std::size_t>(dof_of_vertex_[v]);
}

std::size_t Mesh::vertex_of_dof(std::size_t j) const {
  if (j >= vertex_of_dof_.size()) throw InputError("Mesh: unknown dof index " + std::to_string(j));
  return vertex_of_dof_[j];
}

std::vector<std::array<std::uint32_t, 2>> Mesh::boundary_facets() const {
  return free_facets(dim_, elements_, [this](std::size_t id) -> const Point& { return point(id); });
}

Mesh interval_mesh(std::size_t n) {
  if (n < 2) throw InputError("interval_mesh: need at least 2 elements");
  const double nd = static_cast<double>(n);
  std::vector<Point> verts;
  std::vector<Simplex> elems;
  std::vector<std::uint8_t> flags(n + 1, 0);
  for (std::size_t i = 0; i <= n; ++i) verts.push_back({static_cast<double>(i) / nd, 0.0});
  for (std::size_t i = 0; i < n; ++i) elems.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1), 0});
  flags[0] = 1;
  flags[n] = 1;
  const auto nv = static_cast<std::uint32_t>(n + 1);
  std::vector<Point> ext = {{-1.0 / nd, 0.0}, {1.0 + 1.0 / nd, 0.0}};
  std::vector<Simplex> ext_elems = {{nv, 0, 0}, {nv - 1, nv + 1, 0}};
  return Mesh(1, std::move(verts), std::move(elems), std::move(flags), std::move(ext), std::move(ext_elems));
}

Mesh unit_square_mesh(std::size_t n) {
  if (n == 0) throw InputError("unit_square_mesh: n must be positive");
  const int ni = static_cast<int>(n);
  return lattice_mesh(-1, ni + 1, n, [ni](int i, int j) {
    const bool inside = i >= 0 && i < ni && j >= 0 && j < ni;
    return inside ? 1 : 2;
  });
}

Mesh lshape_mesh(std::size_t n) {
  if (n == 0) throw InputError("lshape_mesh: n must be positive");
  const int ni = static_cast<int>(n);
  auto in_domain = [ni](int i, int j) {
    if (i < 0 || j < 0 || i >= 2 * ni || j >= 2 * ni) return false;
    return i < ni || j < ni;
  };
  return lattice_mesh(-1, 2 * ni + 1, 2 * n, [=](int i, int j) {
    if (in_domain(i, j)) return 1;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        if (in_domain(i + di, j + dj)) return 2;
    return 0;
  });
}

Mesh refine(const Mesh& m) {
  const std::size_t nv = m.num_vertices();
  std::vector<Point> verts(m.vertices().begin(), m.vertices().end());
  std::unordered_map<std::uint64_t, std::uint32_t> mid;
  auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
    auto [it, inserted] = mid.try_emplace(edge_key(a, b), 0u);
    if (inserted) {
      const Point& pa = m.point(a);
      const Point& pb = m.point(b);
      it->second = static_cast<std::uint32_t>(verts.size());
      verts.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    }
    return it->second;
  };
  auto split = [&](const Simplex& e, auto&& vertex_of_mid, std::vector<Simplex>& out) {
    if (m.dim() == 1) {
      const auto c = vertex_of_mid(e[0], e[1]);
      out.push_back({e[0], c, 0});
      out.push_back({c, e[1], 0});
      return;
    }
    const auto ab = vertex_of_mid(e[0], e[1]);
    const auto bc = vertex_of_mid(e[1], e[2]);
    const auto ca = vertex_of_mid(e[2], e[0]);
    out.push_back({e[0], ab, ca});
    out.push_back({ab, e[1], bc});
    out.push_back({ca, bc, e[2]});
    out.push_back({ab, bc, ca});
  };

  // Domain vertex ids keep their values; exterior ids shift past the new
  // domain vertices.
  std::vector<Simplex> elems;
  for (const auto& e : m.elements()) split(e, midpoint, elems);
  const auto nv_new = static_cast<std::uint32_t>(verts.size());

  std::vector<Point> ext_verts(m.exterior_vertices().begin(), m.exterior_vertices().end());
  auto new_point = [&](std::uint32_t id) -> Point {
    return id < nv_new ? verts[id] : ext_verts[id - nv_new];
  };
  std::unordered_map<std::uint64_t, std::uint32_t> ext_mid;
  auto ext_midpoint = [&](std::uint32_t a, std::uint32_t b) -> std::uint32_t {
    if (a < nv && b < nv) {
      auto it = mid.find(edge_key(a, b));
      if (it != mid.end()) return it->second;
    }
    auto [it, inserted] = ext_mid.try_emplace(edge_key(a, b), 0u);
    if (inserted) {
      const Point pa = new_point(a);
      const Point pb = new_point(b);
      it->second = static_cast<std::uint32_t>(nv_new + ext_verts.size());
      ext_verts.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    }
    return it->second;
  };
  std::vector<Simplex> ext_elems;
  for (const auto& e : m.exterior_elements()) {
    Simplex r = e;
    for (int a = 0; a <= m.dim(); ++a)
      if (r[a] >= nv) r[a] = static_cast<std::uint32_t>(nv_new + (r[a] - nv));
    split(r, ext_midpoint, ext_elems);
  }
  auto flags = boundary_flags(m.dim(), verts.size(), elems, verts);
  return Mesh(m.dim(), std::move(verts), std::move(elems), std::move(flags), std::move(ext_verts),
              std::move(ext_elems));
}

double simplex_measure(const Mesh& m, const Simplex& s) {
  if (m.dim() == 1) return std::abs(m.point(s[1])[0] - m.point(s[0])[0]);
  return std::abs(signed_area(m.point(s[0]), m.point(s[1]), m.point(s[2])));
}

double shape_regularity(const Mesh& m, const Simplex& s) {
  if (m.dim() == 1) return 1.0;
  const double a = std::sqrt(dist2(m.point(s[0]), m.point(s[1])));
  const double b = std::sqrt(dist2(m.point(s[1]), m.point(s[2])));
  const double c = std::sqrt(dist2(m.point(s[2]), m.point(s[0])));
  const double area = simplex_measure(m, s);
  const double inradius = area / (0.5 * (a + b + c));
  return std::max({a, b, c}) / (2.0 * inradius);
}

std::vector<Box> support_boxes(const Mesh& m) {
  std::vector<Box> boxes(m.num_dofs(), Box::empty(m.dim()));
  for (const auto& e : m.elements())
    for (int a = 0; a <= m.dim(); ++a) {
      const auto dof = m.dof_map()[e[a]];
      if (dof < 0) continue;
      for (int b = 0; b <= m.dim(); ++b) boxes[static_cast<std::size_t>(dof)].extend(m.point(e[b]));
    }
  return boxes;
}

Box support_box(const Mesh& m, std::size_t j) {
  const std::size_t v = m.vertex_of_dof(j);
  Box box = Box::empty(m.dim());
  for (const auto& e : m.elements()) {
    bool touches = false;
    for (int a = 0; a <= m.dim(); ++a) touches = touches || e[a] == v;
    if (!touches) continue;
    for (int a = 0; a <= m.dim(); ++a) box.extend(m.point(e[a]));
  }
  return box;
}

void validate(const Mesh& m) {
  for (std::size_t k = 0; k < m.num_elements(); ++k) {
    const auto& e = m.elements()[k];
    if (!(simplex_measure(m, e) > 0.0)) throw InputError("degenerate element " + std::to_string(k));
    if (shape_regularity(m, e) > 10.0) throw InputError("element " + std::to_string(k) + " violates shape regularity");
  }
  std::vector<int> seen(m.num_dofs(), 0);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const auto d = m.dof_of_vertex(v);
    if (m.is_boundary(v) == d.has_value()) throw InputError("dof map inconsistent at vertex " + std::to_string(v));
    if (d && seen[*d]++) throw InputError("dof map is not injective");
  }
  if (m.dim() == 2) {
    std::map<std::uint64_t, int> facet_count;
    for (const auto& e : m.elements())
      for (int k = 0; k < 3; ++k) ++facet_count[edge_key(e[k], e[(k + 1) % 3])];
    for (const auto& [key, c] : facet_count)
      if (c > 2) throw InputError("non-conforming mesh: facet shared by more than two elements");
  }
  auto flags = boundary_flags(m.dim(), m.num_vertices(), m.elements(), m.vertices());
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (flags[v] && !m.is_boundary(v)) throw InputError("vertex on a free facet is not flagged as boundary");
}

}  // namespace fraclap
