#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fraclap/dense.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

/// C(d,s) = 2^{2s} s Gamma(s + d/2) / (pi^{d/2} Gamma(1 - s)).
double normalization_constant(int d, double s);

/// Dimension, fractional order and the matching normalization constant.
struct FracParams {
  int d = 2;
  double s = 0.5;
  double c_ds = 0.0;

  static FracParams make(int d, double s) { return FracParams{d, s, normalization_constant(d, s)}; }
};

struct QuadratureSpec {
  /// Points per direction for pairs of elements without a common vertex.
  /// Pairs closer than a few element diameters use gauss_order + 2 or + 4.
  int gauss_order = 4;
  /// Points per direction on the regularised faces of touching pairs.
  int singular_order = 12;
  /// Points per direction for the exterior-weight integral over an element.
  int complement_order = 8;

  void validate() const;
  QuadratureSpec increased(int by) const { return {gauss_order + by, singular_order + by, complement_order + by}; }
};

/// omega(x) = integral over the complement of the domain of |x - y|^{-d-2s}.
/// Evaluated in closed form from the boundary of the domain. Throws
/// std::domain_error unless x lies strictly inside the domain.
double complement_weight(const Mesh& m, const Point& x, double s);

/// Galerkin matrix of the integral fractional Laplacian on the hat-function
/// basis of `m`:
///
///   A_ij = C(d,s)/2 [ int_{Omega x Omega} (psi_i(x)-psi_i(y))(psi_j(x)-psi_j(y)) |x-y|^{-d-2s}
///                     + 2 int_Omega psi_i psi_j omega ].
///
/// Element pairs sharing a vertex are integrated after recursive Duffy-type
/// cone transforms that factor the kernel singularity out analytically; the
/// remaining pairs only contribute the cross terms -psi_i(x) psi_j(y), since
/// the far part of the y-integral of psi_i(x) psi_j(x) is evaluated in
/// closed form on the boundary of each element patch. The result is exactly
/// symmetric and bit-identical for any thread count.
DenseMatrix assemble_stiffness(const Mesh& m, const FracParams& p, const QuadratureSpec& q = {},
                               unsigned threads = 0);

/// Independent reference for A_ij on interval meshes: nested adaptive 1D
/// quadrature with the diagonal x = y split out. Throws InputError for d = 2.
double entry_oracle(const Mesh& m, const FracParams& p, std::size_t i, std::size_t j);

/// b_i = int_Omega f psi_i.
std::vector<double> load_vector(const Mesh& m, const std::function<double(const Point&)>& f,
                                const QuadratureSpec& q = {});

}  // namespace fraclap
