#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "fraclap/error.hpp"
#include "fraclap/mesh.hpp"

using namespace fraclap;

namespace {

double total_measure(const Mesh& m) {
  double a = 0.0;
  for (const auto& e : m.elements()) a += simplex_measure(m, e);
  return a;
}

double boundary_length(const Mesh& m) {
  double len = 0.0;
  for (const auto& f : m.boundary_facets()) len += std::sqrt(dist2(m.point(f[0]), m.point(f[1])));
  return len;
}

// Barycentric coordinates of p in a triangle.
std::array<double, 3> barycentric(const Point& a, const Point& b, const Point& c, const Point& p) {
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
  const double l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
  const double l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
  return {1.0 - l1 - l2, l1, l2};
}

std::vector<std::pair<double, double>> sorted_interval_elements(const Mesh& m) {
  std::vector<std::pair<double, double>> out;
  for (const auto& e : m.elements()) {
    double a = m.vertices()[e[0]][0], b = m.vertices()[e[1]][0];
    out.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("unit square mesh counts") {
  auto m1 = unit_square_mesh(1);
  CHECK(m1.num_elements() == 2);
  CHECK(m1.num_dofs() == 0);
  CHECK(std::count(m1.boundary().begin(), m1.boundary().end(), 1) == 4);

  auto m4 = unit_square_mesh(4);
  CHECK(m4.num_elements() == 32);
  CHECK(m4.num_dofs() == 9);
  CHECK(m4.h() == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-15));

  auto m37 = unit_square_mesh(37);
  CHECK(m37.num_elements() == 2738);
  CHECK(m37.num_dofs() == 1296);
  CHECK_THROWS_AS(unit_square_mesh(0), InputError);
}

TEST_CASE("square diagonal runs lower left to upper right") {
  auto m = unit_square_mesh(1);
  std::set<std::pair<double, double>> shared;
  for (const auto& e : m.elements()) {
    std::set<std::pair<double, double>> pts;
    for (int a = 0; a < 3; ++a) pts.insert({m.vertices()[e[a]][0], m.vertices()[e[a]][1]});
    CHECK(pts.count({0.0, 0.0}) == 1);
    CHECK(pts.count({1.0, 1.0}) == 1);
  }
}

TEST_CASE("L-shape mesh counts and conformity") {
  CHECK(lshape_mesh(1).num_elements() == 6);
  auto m2 = lshape_mesh(2);
  CHECK(m2.num_elements() == 24);
  // Any hanging node would leave interior facets unmatched and lengthen the boundary.
  CHECK(boundary_length(m2) == doctest::Approx(4.0).epsilon(1e-14));
  validate(m2);
  CHECK(lshape_mesh(33).num_elements() == 6534);
  CHECK_THROWS_AS(lshape_mesh(0), InputError);
  // The reentrant corner is a boundary vertex.
  for (std::size_t v = 0; v < m2.num_vertices(); ++v)
    if (m2.vertices()[v] == Point{0.5, 0.5}) CHECK(m2.is_boundary(v));
}

TEST_CASE("interval mesh") {
  auto m2 = interval_mesh(2);
  REQUIRE(m2.num_dofs() == 1);
  CHECK(m2.vertices()[m2.vertex_of_dof(0)][0] == 0.5);

  auto m4 = interval_mesh(4);
  REQUIRE(m4.num_dofs() == 3);
  std::vector<double> xs;
  for (std::size_t j = 0; j < 3; ++j) xs.push_back(m4.vertices()[m4.vertex_of_dof(j)][0]);
  std::sort(xs.begin(), xs.end());
  CHECK(xs == std::vector<double>{0.25, 0.5, 0.75});

  auto m8 = interval_mesh(8);
  CHECK(m8.h() == 0.125);
  CHECK(m8.num_dofs() == 7);
  CHECK_THROWS_AS(interval_mesh(1), InputError);
}

TEST_CASE("total measure equals the domain measure") {
  for (std::size_t n : {1u, 3u, 8u, 17u}) {
    CHECK(total_measure(unit_square_mesh(n)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(total_measure(lshape_mesh(n)) == doctest::Approx(0.75).epsilon(1e-12));
    if (n >= 2) CHECK(total_measure(interval_mesh(n)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("refinement") {
  CHECK(refine(unit_square_mesh(1)).num_elements() == 8);

  Mesh m = unit_square_mesh(1);
  for (int k = 1; k <= 4; ++k) {
    m = refine(m);
    CHECK(m.num_elements() == 2u * (1u << (2 * k)));
    validate(m);
  }

  auto r = refine(interval_mesh(4));
  auto m8 = interval_mesh(8);
  CHECK(sorted_interval_elements(r) == sorted_interval_elements(m8));
  CHECK(r.num_dofs() == m8.num_dofs());

  // Children are similar to their parent, so the regularity constant is unchanged.
  for (const Mesh& base : {unit_square_mesh(3), lshape_mesh(2)}) {
    auto worst = [](const Mesh& mm) {
      double w = 0.0;
      for (const auto& e : mm.elements()) w = std::max(w, shape_regularity(mm, e));
      return w;
    };
    const Mesh fine = refine(base);
    CHECK(worst(fine) == doctest::Approx(worst(base)).epsilon(1e-12));
    CHECK(fine.h() == doctest::Approx(base.h() / 2).epsilon(1e-14));
    CHECK(worst(base) <= 10.0);
  }
}

TEST_CASE("support boxes") {
  auto m = interval_mesh(4);
  std::size_t mid = 0;
  for (std::size_t j = 0; j < m.num_dofs(); ++j)
    if (m.vertices()[m.vertex_of_dof(j)][0] == 0.5) mid = j;
  const Box b = support_box(m, mid);
  CHECK(b.lower[0] == 0.25);
  CHECK(b.upper[0] == 0.75);

  auto sq = unit_square_mesh(4);
  for (std::size_t j = 0; j < sq.num_dofs(); ++j) {
    const Box bj = support_box(sq, j);
    CHECK(bj.side(0) <= 0.5 + 1e-15);
    CHECK(bj.side(1) <= 0.5 + 1e-15);
    CHECK(bj.contains(sq.vertices()[sq.vertex_of_dof(j)]));
  }
  for (const Mesh& mm : {lshape_mesh(3), interval_mesh(7)}) {
    const auto boxes = support_boxes(mm);
    for (std::size_t j = 0; j < mm.num_dofs(); ++j) CHECK(boxes[j].contains(mm.vertices()[mm.vertex_of_dof(j)]));
  }
  CHECK_THROWS_AS(support_box(sq, sq.num_dofs()), InputError);
}

TEST_CASE("dof map is a bijection onto interior vertices") {
  for (const Mesh& m : {unit_square_mesh(5), lshape_mesh(3), interval_mesh(6)}) {
    std::set<std::size_t> seen;
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
      const auto d = m.dof_of_vertex(v);
      CHECK(d.has_value() == !m.is_boundary(v));
      if (d) {
        CHECK(m.vertex_of_dof(*d) == v);
        seen.insert(*d);
      }
    }
    CHECK(seen.size() == m.num_dofs());
  }
}

TEST_CASE("hat functions are nodal") {
  const Mesh m = lshape_mesh(2);
  for (std::size_t j = 0; j < m.num_dofs(); ++j) {
    const std::size_t vj = m.vertex_of_dof(j);
    for (const auto& e : m.elements()) {
      const int local = e[0] == vj ? 0 : e[1] == vj ? 1 : e[2] == vj ? 2 : -1;
      if (local < 0) continue;
      for (int a = 0; a < 3; ++a) {
        const auto l = barycentric(m.vertices()[e[0]], m.vertices()[e[1]], m.vertices()[e[2]], m.vertices()[e[a]]);
        CHECK(l[local] == doctest::Approx(a == local ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("mesh JSON round trip is exact") {
  for (const Mesh& m : {lshape_mesh(2), interval_mesh(5), refine(unit_square_mesh(3))}) {
    const std::string text = to_json(m);
    const Mesh back = mesh_from_json(text);
    CHECK(to_json(back) == text);
    CHECK(back.dim() == m.dim());
    CHECK(std::equal(m.vertices().begin(), m.vertices().end(), back.vertices().begin(), back.vertices().end()));
    CHECK(std::equal(m.elements().begin(), m.elements().end(), back.elements().begin(), back.elements().end()));
    CHECK(back.num_dofs() == m.num_dofs());
    CHECK(back.exterior_elements().size() == m.exterior_elements().size());
  }
  const auto path = std::filesystem::temp_directory_path() / "fraclap_mesh_roundtrip.json";
  save_mesh(path.string(), lshape_mesh(3));
  CHECK(to_json(load_mesh(path.string())) == to_json(lshape_mesh(3)));
  std::filesystem::remove(path);
}

TEST_CASE("invalid mesh JSON is rejected") {
  CHECK_THROWS_AS(mesh_from_json("{"), InputError);
  CHECK_THROWS_AS(mesh_from_json(R"({"dim": 3, "vertices": [], "elements": [], "boundary": []})"), InputError);
  CHECK_THROWS_AS(mesh_from_json(R"({"dim": 1, "vertices": [[0],[1]], "elements": [[0,5]], "boundary": [1,1]})"),
                  InputError);
  CHECK_THROWS_AS(mesh_from_json(R"({"dim": 1, "vertices": [[0],[1]], "elements": [[0,1]], "boundary": [1]})"),
                  InputError);
}
