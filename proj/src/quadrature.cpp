#include "fraclap/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "fraclap/error.hpp"

namespace fraclap {

SimplexRule gauss_legendre(int n) {
  if (n < 1) throw InputError("gauss_legendre: need at least one point");
  SimplexRule rule;
  rule.dim = 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1], ascending.
    rule.points[n - 1 - i] = {0.5 * (x + 1.0), 0.0};
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

SimplexRule simplex_rule(int dim, int order) {
  if (order < 1) throw InputError("simplex_rule: order must be positive");
  switch (dim) {
    case 0: {
      SimplexRule r;
      r.points = {{0.0, 0.0}};
      r.weights = {1.0};
      return r;
    }
    case 1:
      return gauss_legendre(order);
    case 2: {
      const SimplexRule g = gauss_legendre(order);
      SimplexRule r;
      r.dim = 2;
      for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
          const double u = g.points[i][0];
          const double v = g.points[j][0];
          r.points.push_back({u, v * (1.0 - u)});
          r.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
        }
      return r;
    }
    default:
      throw InputError("simplex_rule: dimension must be 0, 1 or 2");
  }
}

}  // namespace fraclap
