#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclap/geometry.hpp"

namespace fraclap {

/// Vertex indices of a simplex; the first dim+1 entries are used.
using Simplex = std::array<std::uint32_t, 3>;

/// Simplicial mesh of a domain in R^d (d = 1 or 2) with the interior-vertex
/// basis index set of continuous piecewise linears vanishing on the boundary.
///
/// A mesh may carry an exterior layer: simplices outside the domain that
/// share vertices with its boundary. They carry no degrees of freedom and are
/// only used by the stiffness assembly to treat the singular behaviour of the
/// complement integral next to the boundary. Exterior simplices index into
/// the combined vertex range: ids below num_vertices() refer to domain
/// vertices, larger ids to exterior_vertices()[id - num_vertices()].
class Mesh {
 public:
  Mesh() = default;
  Mesh(int dim, std::vector<Point> vertices, std::vector<Simplex> elements,
       std::vector<std::uint8_t> boundary, std::vector<Point> exterior_vertices = {},
       std::vector<Simplex> exterior_elements = {});

  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_dofs() const { return vertex_of_dof_.size(); }

  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Simplex> elements() const { return elements_; }
  std::span<const std::uint8_t> boundary() const { return boundary_; }
  bool is_boundary(std::size_t v) const { return boundary_[v] != 0; }

  /// Basis index of a vertex, or nullopt for boundary vertices.
  std::optional<std::size_t> dof_of_vertex(std::size_t v) const;
  std::size_t vertex_of_dof(std::size_t j) const;
  std::span<const std::int64_t> dof_map() const { return dof_of_vertex_; }

  /// Mesh width: largest element diameter.
  double h() const { return h_; }

  std::span<const Point> exterior_vertices() const { return exterior_vertices_; }
  std::span<const Simplex> exterior_elements() const { return exterior_elements_; }
  bool has_exterior() const { return !exterior_elements_.empty(); }

  /// Coordinates of a vertex in the combined (domain + exterior) range.
  const Point& point(std::size_t id) const {
    return id < vertices_.size() ? vertices_[id] : exterior_vertices_[id - vertices_.size()];
  }

  /// Facets lying on the domain boundary, oriented so the domain is on the
  /// left (d = 2); in d = 1 a facet is a single vertex (second entry unused).
  std::vector<std::array<std::uint32_t, 2>> boundary_facets() const;

 private:
  int dim_ = 0;
  std::vector<Point> vertices_;
  std::vector<Simplex> elements_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::int64_t> dof_of_vertex_;
  std::vector<std::size_t> vertex_of_dof_;
  std::vector<Point> exterior_vertices_;
  std::vector<Simplex> exterior_elements_;
  double h_ = 0.0;
};

/// Uniform mesh of (0,1) with n elements; n >= 2.
Mesh interval_mesh(std::size_t n);
/// (0,1)^2 split into n x n squares, each cut along the lower-left to
/// upper-right diagonal.
Mesh unit_square_mesh(std::size_t n);
/// (0,1)^2 minus [1/2,1)x[1/2,1); each of the three quadrants meshed like
/// unit_square_mesh(n) scaled by 1/2.
Mesh lshape_mesh(std::size_t n);

/// Uniform red refinement: every simplex split into 2^d similar children.
Mesh refine(const Mesh& m);

/// Measure (length or area) of a simplex given by combined vertex ids.
double simplex_measure(const Mesh& m, const Simplex& s);
/// Diameter over inscribed-ball diameter.
double shape_regularity(const Mesh& m, const Simplex& s);

/// Bounding box of the support of the hat function of dof j.
/// Throws InputError for an unknown dof.
Box support_box(const Mesh& m, std::size_t j);
/// support_box for every dof, in dof order.
std::vector<Box> support_boxes(const Mesh& m);

/// Throws InputError if any mesh invariant is violated.
void validate(const Mesh& m);

/// Mesh JSON: {"dim", "vertices", "elements", "boundary"} plus the optional
/// "exterior_vertices" and "exterior_elements".
std::string to_json(const Mesh& m);
Mesh mesh_from_json(const std::string& text);
void save_mesh(const std::string& path, const Mesh& m);
Mesh load_mesh(const std::string& path);

}  // namespace fraclap
