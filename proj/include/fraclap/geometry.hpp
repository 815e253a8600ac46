#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace fraclap {

/// Point in R^d, d <= 2. Unused trailing coordinates are zero.
using Point = std::array<double, 2>;

/// Axis-aligned box in R^d.
struct Box {
  int dim = 2;
  Point lower{0.0, 0.0};
  Point upper{0.0, 0.0};

  static Box empty(int dim) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Box{dim, {inf, inf}, {-inf, -inf}};
  }

  bool is_empty() const { return lower[0] > upper[0]; }

  void extend(const Point& p) {
    for (int k = 0; k < dim; ++k) {
      lower[k] = std::min(lower[k], p[k]);
      upper[k] = std::max(upper[k], p[k]);
    }
  }

  void extend(const Box& b) {
    for (int k = 0; k < dim; ++k) {
      lower[k] = std::min(lower[k], b.lower[k]);
      upper[k] = std::max(upper[k], b.upper[k]);
    }
  }

  bool contains(const Point& p) const {
    for (int k = 0; k < dim; ++k)
      if (p[k] < lower[k] || p[k] > upper[k]) return false;
    return true;
  }

  double side(int k) const { return upper[k] - lower[k]; }

  Point center() const {
    Point c{0.0, 0.0};
    for (int k = 0; k < dim; ++k) c[k] = 0.5 * (lower[k] + upper[k]);
    return c;
  }

  double diameter() const {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += side(k) * side(k);
    return std::sqrt(s);
  }
};

/// Euclidean distance between boxes; componentwise gaps clamped at zero.
inline double distance(const Box& a, const Box& b) {
  double s = 0.0;
  for (int k = 0; k < a.dim; ++k) {
    const double gap = std::max({0.0, a.lower[k] - b.upper[k], b.lower[k] - a.upper[k]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

inline double dist2(const Point& a, const Point& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

}  // namespace fraclap
