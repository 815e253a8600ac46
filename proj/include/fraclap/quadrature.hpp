#pragma once

#include <array>
#include <vector>

namespace fraclap {

/// Quadrature rule on the reference simplex of dimension 0, 1 or 2:
/// the point {0}, the interval [0,1], or the triangle {x, y >= 0, x + y <= 1}.
/// Weights sum to the reference measure (1, 1, 1/2).
struct SimplexRule {
  int dim = 0;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0,1].
SimplexRule gauss_legendre(int n);

/// Rule on the reference simplex of dimension `dim` with `order` points per
/// direction: Gauss-Legendre in 1D, collapsed (Duffy) tensor Gauss on the
/// triangle.
SimplexRule simplex_rule(int dim, int order);

}  // namespace fraclap
