#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fraclap/assembly.hpp"
#include "fraclap/error.hpp"

namespace fraclap {

namespace {

/// Hat function of a vertex on a sorted 1D node list.
struct Hat {
  double left, center, right;

  double operator()(double x) const {
    if (x <= left || x >= right) return 0.0;
    return x <= center ? (x - left) / (center - left) : (right - x) / (right - center);
  }
};

}  // namespace

double entry_oracle(const Mesh& m, const FracParams& p, std::size_t i, std::size_t j) {
  if (m.dim() != 1) throw InputError("entry_oracle: only interval meshes are supported");
  if (i >= m.num_dofs() || j >= m.num_dofs()) throw InputError("entry_oracle: unknown dof index");
  std::vector<double> nodes;
  for (const auto& v : m.vertices()) nodes.push_back(v[0]);
  std::sort(nodes.begin(), nodes.end());
  auto hat_of = [&](std::size_t dof) {
    const double c = m.vertices()[m.vertex_of_dof(dof)][0];
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), c);
    return Hat{*(it - 1), c, *(it + 1)};
  };
  const Hat hi = hat_of(i), hj = hat_of(j);
  const double a = nodes.front(), b = nodes.back();
  const double s = p.s;
  const double expo = 1.0 + 2.0 * s;

  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

  auto inner = [&](double x) {
    auto f = [&](double y) {
      const double r = std::abs(x - y);
      const double num = (hi(x) - hi(y)) * (hj(x) - hj(y));
      if (num == 0.0) return 0.0;
      return num * std::pow(r, -expo);
    };
    // Pieces ending at y = x use y = x -+ t^2, which removes the
    // |x - y|^{1-2s} endpoint behaviour.
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const double c0 = nodes[k], c1 = nodes[k + 1];
      if (x > c0 && x < c1) {
        sum += Rule::integrate([&](double t) { return 2.0 * t * f(x - t * t); }, 0.0, std::sqrt(x - c0), 8, 1e-11);
        sum += Rule::integrate([&](double t) { return 2.0 * t * f(x + t * t); }, 0.0, std::sqrt(c1 - x), 8, 1e-11);
      } else if (x <= c0) {
        sum += Rule::integrate([&](double t) { return 2.0 * t * f(x + t * t); }, std::sqrt(c0 - x),
                               std::sqrt(c1 - x), 8, 1e-11);
      } else {
        sum += Rule::integrate([&](double t) { return 2.0 * t * f(x - t * t); }, std::sqrt(x - c1),
                               std::sqrt(x - c0), 8, 1e-11);
      }
    }
    return sum;
  };
  auto outer = [&](double x) {
    const double mass = hi(x) * hj(x);
    if (mass == 0.0) return inner(x);
    const double omega = (std::pow(x - a, -2.0 * s) + std::pow(b - x, -2.0 * s)) / (2.0 * s);
    return inner(x) + 2.0 * mass * omega;
  };
  double total = 0.0;
  // x = c0 + L (3u^2 - 2u^3) flattens the |x - node|^{1-2s} behaviour of the
  // inner integral at both ends of every node interval.
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double c0 = nodes[k], len = nodes[k + 1] - nodes[k];
    auto mapped = [&](double u) {
      const double w = 6.0 * len * u * (1.0 - u);
      if (w == 0.0) return 0.0;
      return w * outer(c0 + len * u * u * (3.0 - 2.0 * u));
    };
    total += Rule::integrate(mapped, 0.0, 1.0, 12, 1e-10);
  }
  return 0.5 * p.c_ds * total;
}

}  // namespace fraclap
