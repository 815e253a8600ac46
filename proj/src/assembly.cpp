#include "fraclap/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "fraclap/error.hpp"
#include "fraclap/parallel.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

double normalization_constant(int d, double s) {
  if (d != 1 && d != 2) throw InputError("normalization_constant: d must be 1 or 2");
  if (!(s > 0.0 && s < 1.0)) throw InputError("normalization_constant: s must lie in (0,1)");
  const double half_d = 0.5 * d;
  return std::pow(2.0, 2.0 * s) * s * std::tgamma(s + half_d) /
         (std::pow(std::numbers::pi, half_d) * std::tgamma(1.0 - s));
}

void QuadratureSpec::validate() const {
  if (gauss_order < 1 || singular_order < 1 || complement_order < 1)
    throw InputError("QuadratureSpec: all orders must be >= 1");
}

namespace {

// A boundary piece of a polygon (d = 2: segment a -> a + len*t with outward
// normal n) or of an interval (d = 1: the point a with outward normal n).
struct Facet {
  Point a{};
  Point t{};
  Point n{};
  double len = 0.0;
};

Facet make_facet(int d, const Point& a, const Point& b, const Point& inside) {
  Facet f;
  f.a = a;
  if (d == 1) {
    f.n = {a[0] < inside[0] ? -1.0 : 1.0, 0.0};
    return f;
  }
  const double dx = b[0] - a[0];
  const double dy = b[1] - a[1];
  f.len = std::hypot(dx, dy);
  f.t = {dx / f.len, dy / f.len};
  f.n = {f.t[1], -f.t[0]};
  return f;
}

/// Closed form of (1/2s) * int_F (y - x).n |y - x|^{-d-2s} dS(y). Summed
/// over the boundary of a region U containing x this gives the integral of
/// |x - y|^{-d-2s} over the complement of U (divergence theorem).
class ExteriorKernel {
 public:
  explicit ExteriorKernel(double s)
      : s_(s), a_(s + 0.5), full_(0.5 * boost::math::beta(s + 0.5, 0.5)) {}

  double operator()(int d, const Facet& f, const Point& x) const {
    const double delta = (f.a[0] - x[0]) * f.n[0] + (f.a[1] - x[1]) * f.n[1];
    if (delta == 0.0) return 0.0;
    const double ad = std::abs(delta);
    const double scale = std::copysign(std::pow(ad, -2.0 * s_), delta) / (2.0 * s_);
    if (d == 1) return scale;
    const double t0 = (f.a[0] - x[0]) * f.t[0] + (f.a[1] - x[1]) * f.t[1];
    return scale * angle_integral(t0 / ad, (t0 + f.len) / ad);
  }

 private:
  // int_{atan u}^{pi/2} cos^{2s}, u >= 0.
  double tail(double u) const { return 0.5 * boost::math::beta(a_, 0.5, 1.0 / (1.0 + u * u)); }

  // int_{atan u0}^{atan u1} cos^{2s}, u0 <= u1.
  double angle_integral(double u0, double u1) const {
    if (u0 >= 0.0) return tail(u0) - tail(u1);
    if (u1 <= 0.0) return tail(-u1) - tail(-u0);
    return (full_ - tail(-u0)) + (full_ - tail(u1));
  }

  double s_;
  double a_;
  double full_;
};

struct Element {
  std::array<Point, 3> p{};
  std::array<std::uint32_t, 3> id{};
  std::array<std::int64_t, 3> dof{-1, -1, -1};
  double jac = 0.0;
};

struct Triplet {
  std::uint32_t i;
  std::uint32_t j;
  double v;
};

std::vector<Element> collect_elements(const Mesh& m) {
  std::vector<Element> out;
  const int nloc = m.dim() + 1;
  auto add = [&](const Simplex& s) {
    Element e;
    for (int a = 0; a < nloc; ++a) {
      e.id[a] = s[a];
      e.p[a] = m.point(s[a]);
      e.dof[a] = s[a] < m.num_vertices() ? m.dof_map()[s[a]] : -1;
    }
    e.jac = simplex_measure(m, s) * (m.dim() == 2 ? 2.0 : 1.0);
    out.push_back(e);
  };
  for (const auto& s : m.elements()) add(s);
  for (const auto& s : m.exterior_elements()) add(s);
  return out;
}

Point map_point(const Element& e, int d, const std::array<double, 2>& ref) {
  if (d == 1) return {e.p[0][0] + ref[0] * (e.p[1][0] - e.p[0][0]), 0.0};
  const double l1 = ref[0], l2 = ref[1];
  return {e.p[0][0] + l1 * (e.p[1][0] - e.p[0][0]) + l2 * (e.p[2][0] - e.p[0][0]),
          e.p[0][1] + l1 * (e.p[1][1] - e.p[0][1]) + l2 * (e.p[2][1] - e.p[0][1])};
}

std::array<double, 3> ref_bary(int d, const std::array<double, 2>& ref) {
  if (d == 1) return {1.0 - ref[0], ref[0], 0.0};
  return {1.0 - ref[0] - ref[1], ref[0], ref[1]};
}

/// Vertex-index list of a face of an element (local indices 0..d).
struct Face {
  std::array<int, 3> v{};
  int n = 0;

  Face without(int pos) const {
    Face f;
    for (int k = 0; k < n; ++k)
      if (k != pos) f.v[f.n++] = v[k];
    return f;
  }
};

/// Integrates (psi_u(x)-psi_u(y))(psi_v(x)-psi_v(y)) |x-y|^{-d-2s} over
/// K x K' for elements sharing at least one vertex.
///
/// With a shared vertex V the integrand is homogeneous of degree 2-d-2s about
/// (V,V), so the product of faces is written as a cone with apex (V,V) over
/// the faces not containing it; the radial integral is done analytically and
/// the recursion continues on faces that still share a vertex. Faces without
/// a common vertex are smooth and get tensor Gauss rules.
class TouchingPairIntegrator {
 public:
  TouchingPairIntegrator(int d, double s, int order) : d_(d), degree_(2.0 - d - 2.0 * s), expo_(0.5 * d + s) {
    for (int k = 0; k <= d; ++k) rules_[k] = simplex_rule(k, order);
  }

  /// Adds weight * (local matrix) to `out` as upper-triangular triplets.
  void integrate(const Element& K, std::size_t k_index, const Element& Kp, std::size_t kp_index, double weight,
                 std::vector<Triplet>& out) {
    K_ = &K;
    Kp_ = &Kp;
    nu_ = 0;
    const int nloc = d_ + 1;
    auto add_union = [&](std::int64_t dof, int in_k, int in_kp) {
      if (dof < 0) return;
      udof_[nu_] = dof;
      in_k_[nu_] = in_k;
      in_kp_[nu_] = in_kp;
      ++nu_;
    };
    for (int a = 0; a < nloc; ++a) {
      int match = -1;
      for (int b = 0; b < nloc; ++b)
        if (Kp.id[b] == K.id[a]) match = b;
      add_union(K.dof[a], a, match);
    }
    for (int b = 0; b < nloc; ++b) {
      bool shared = false;
      for (int a = 0; a < nloc; ++a) shared = shared || K.id[a] == Kp.id[b];
      if (!shared) add_union(Kp.dof[b], -1, b);
    }
    if (nu_ == 0) return;
    acc_.fill(0.0);
    leaf_scale_.fill(0.0);
    Face full;
    full.n = nloc;
    for (int a = 0; a < nloc; ++a) full.v[a] = a;
    recurse(full, full, K.jac * Kp.jac);
    // Many recursion paths end in the same pair of faces; each is integrated once.
    for (int key = 0; key < 64; ++key)
      if (leaf_scale_[key] != 0.0) leaf(face_of(key & 7), face_of(key >> 3), leaf_scale_[key]);
    for (int u = 0; u < nu_; ++u)
      for (int v = u; v < nu_; ++v) {
        const double val = acc_[u * 6 + v];
        if (!std::isfinite(val))
          throw NumericalError("assembly: non-finite quadrature value for element pair (" +
                               std::to_string(k_index) + ", " + std::to_string(kp_index) + ")");
        const auto gi = static_cast<std::uint32_t>(std::min(udof_[u], udof_[v]));
        const auto gj = static_cast<std::uint32_t>(std::max(udof_[u], udof_[v]));
        out.push_back({gi, gj, weight * val});
      }
  }

 private:
  void recurse(const Face& f1, const Face& f2, double scale) {
    for (int a = 0; a < f1.n; ++a)
      for (int b = 0; b < f2.n; ++b)
        if (K_->id[f1.v[a]] == Kp_->id[f2.v[b]]) {
          const int k = f1.n + f2.n - 2;
          const double denom = k + degree_;
          if (!(denom > 0.0)) throw NumericalError("assembly: non-integrable face in singular quadrature");
          if (f1.n > 1) recurse(f1.without(a), f2, scale / denom);
          if (f2.n > 1) recurse(f1, f2.without(b), scale / denom);
          return;
        }
    leaf_scale_[mask_of(f1) | (mask_of(f2) << 3)] += scale;
  }

  static int mask_of(const Face& f) {
    int m = 0;
    for (int k = 0; k < f.n; ++k) m |= 1 << f.v[k];
    return m;
  }

  static Face face_of(int mask) {
    Face f;
    for (int a = 0; a < 3; ++a)
      if (mask & (1 << a)) f.v[f.n++] = a;
    return f;
  }

  // Point and element barycentrics for a reference point on a face.
  void face_point(const Element& e, const Face& f, const std::array<double, 2>& ref, Point& x,
                  std::array<double, 3>& bary) const {
    bary = {0.0, 0.0, 0.0};
    double rest = 1.0;
    for (int k = 1; k < f.n; ++k) {
      bary[f.v[k]] = ref[k - 1];
      rest -= ref[k - 1];
    }
    bary[f.v[0]] = rest;
    x = {0.0, 0.0};
    for (int k = 0; k <= d_; ++k) {
      x[0] += bary[k] * e.p[k][0];
      x[1] += bary[k] * e.p[k][1];
    }
  }

  void leaf(const Face& f1, const Face& f2, double scale) {
    const SimplexRule& r1 = rules_[f1.n - 1];
    const SimplexRule& r2 = rules_[f2.n - 1];
    std::array<double, 6> dx{}, dy{};
    for (std::size_t q1 = 0; q1 < r1.size(); ++q1) {
      Point x;
      std::array<double, 3> bx;
      face_point(*K_, f1, r1.points[q1], x, bx);
      for (int u = 0; u < nu_; ++u) dx[u] = in_k_[u] >= 0 ? bx[in_k_[u]] : 0.0;
      for (std::size_t q2 = 0; q2 < r2.size(); ++q2) {
        Point y;
        std::array<double, 3> by;
        face_point(*Kp_, f2, r2.points[q2], y, by);
        const double w = scale * r1.weights[q1] * r2.weights[q2] * std::pow(dist2(x, y), -expo_);
        for (int u = 0; u < nu_; ++u) dy[u] = dx[u] - (in_kp_[u] >= 0 ? by[in_kp_[u]] : 0.0);
        for (int u = 0; u < nu_; ++u) {
          const double wu = w * dy[u];
          for (int v = u; v < nu_; ++v) acc_[u * 6 + v] += wu * dy[v];
        }
      }
    }
  }

  int d_;
  double degree_;
  double expo_;
  std::array<SimplexRule, 3> rules_;
  const Element* K_ = nullptr;
  const Element* Kp_ = nullptr;
  int nu_ = 0;
  std::array<std::int64_t, 6> udof_{};
  std::array<int, 6> in_k_{};
  std::array<int, 6> in_kp_{};
  std::array<double, 36> acc_{};
  std::array<double, 64> leaf_scale_{};
};

/// Boundary of the union of `patch` elements, as facets.
std::vector<Facet> patch_boundary(int d, std::span<const Element> elems, std::span<const std::size_t> patch,
                                  const Point& inside) {
  std::vector<Facet> out;
  if (d == 1) {
    std::map<std::uint32_t, std::pair<int, Point>> count;
    for (auto k : patch)
      for (int a = 0; a < 2; ++a) {
        auto& c = count[elems[k].id[a]];
        ++c.first;
        c.second = elems[k].p[a];
      }
    for (const auto& [id, c] : count)
      if (c.first == 1) out.push_back(make_facet(1, c.second, c.second, inside));
    return out;
  }
  struct Edge {
    int count = 0;
    Point a, b;
  };
  std::map<std::pair<std::uint32_t, std::uint32_t>, Edge> edges;
  for (auto k : patch) {
    const Element& e = elems[k];
    const double orient = (e.p[1][0] - e.p[0][0]) * (e.p[2][1] - e.p[0][1]) -
                          (e.p[1][1] - e.p[0][1]) * (e.p[2][0] - e.p[0][0]);
    for (int a = 0; a < 3; ++a) {
      int i0 = a, i1 = (a + 1) % 3;
      if (orient < 0.0) std::swap(i0, i1);
      const auto key = std::minmax(e.id[i0], e.id[i1]);
      Edge& edge = edges[{key.first, key.second}];
      ++edge.count;
      edge.a = e.p[i0];
      edge.b = e.p[i1];
    }
  }
  for (const auto& [key, edge] : edges)
    if (edge.count == 1) out.push_back(make_facet(2, edge.a, edge.b, inside));
  return out;
}

Point centroid(const Element& e, int d) {
  Point c{0.0, 0.0};
  for (int a = 0; a <= d; ++a) {
    c[0] += e.p[a][0] / (d + 1);
    c[1] += e.p[a][1] / (d + 1);
  }
  return c;
}

}  // namespace

double complement_weight(const Mesh& m, const Point& x, double s) {
  if (!(s > 0.0 && s < 1.0)) throw InputError("complement_weight: s must lie in (0,1)");
  const int d = m.dim();
  const auto elems = collect_elements(m);
  bool inside = false;
  for (std::size_t k = 0; k < m.num_elements() && !inside; ++k) {
    const Element& e = elems[k];
    if (d == 1) {
      const double lo = std::min(e.p[0][0], e.p[1][0]);
      const double hi = std::max(e.p[0][0], e.p[1][0]);
      inside = x[0] >= lo && x[0] <= hi;
    } else {
      const double det = (e.p[1][0] - e.p[0][0]) * (e.p[2][1] - e.p[0][1]) -
                         (e.p[1][1] - e.p[0][1]) * (e.p[2][0] - e.p[0][0]);
      const double l1 = ((x[0] - e.p[0][0]) * (e.p[2][1] - e.p[0][1]) -
                         (x[1] - e.p[0][1]) * (e.p[2][0] - e.p[0][0])) / det;
      const double l2 = ((e.p[1][0] - e.p[0][0]) * (x[1] - e.p[0][1]) -
                         (e.p[1][1] - e.p[0][1]) * (x[0] - e.p[0][0])) / det;
      constexpr double tol = -1e-14;
      inside = l1 >= tol && l2 >= tol && 1.0 - l1 - l2 >= tol;
    }
  }
  if (!inside) throw std::domain_error("complement_weight: point outside the domain");
  const ExteriorKernel kernel(s);
  double sum = 0.0;
  for (const auto& bf : m.boundary_facets()) {
    const Point& a = m.point(bf[0]);
    const Point& b = m.point(bf[1]);
    // Distance from x to the facet; the weight diverges on the boundary.
    double dist;
    if (d == 1) {
      dist = std::abs(x[0] - a[0]);
    } else {
      const double lx = b[0] - a[0], ly = b[1] - a[1];
      const double t = std::clamp(((x[0] - a[0]) * lx + (x[1] - a[1]) * ly) / (lx * lx + ly * ly), 0.0, 1.0);
      dist = std::hypot(x[0] - a[0] - t * lx, x[1] - a[1] - t * ly);
    }
    if (dist <= 1e-14) throw std::domain_error("complement_weight: point on the boundary");
    Facet f;
    if (d == 1) {
      f = make_facet(1, a, a, x);
    } else {
      f = make_facet(2, a, b, x);
    }
    sum += kernel(d, f, x);
  }
  return sum;
}

namespace {

// Relative separations below which the finer cross-term tiers are used.
constexpr double kNearRatio = 1.5;
constexpr double kMidRatio = 4.0;

/// Quadrature points and weights of one rule mapped onto every domain element.
struct CrossRule {
  std::size_t nq = 0;
  std::vector<double> bary;  // bary[a * nq + l]
  std::vector<Point> pts;
  std::vector<double> w;

  CrossRule(std::span<const Element> elems, std::size_t ne, int d, int order) {
    const SimplexRule rule = simplex_rule(d, order);
    nq = rule.size();
    bary.assign(static_cast<std::size_t>(d + 1) * nq, 0.0);
    for (std::size_t l = 0; l < nq; ++l) {
      const auto b = ref_bary(d, rule.points[l]);
      for (int a = 0; a <= d; ++a) bary[a * nq + l] = b[a];
    }
    pts.resize(ne * nq);
    w.resize(ne * nq);
    for (std::size_t k = 0; k < ne; ++k)
      for (std::size_t l = 0; l < nq; ++l) {
        pts[k * nq + l] = map_point(elems[k], d, rule.points[l]);
        w[k * nq + l] = rule.weights[l] * elems[k].jac;
      }
  }
};

}  // namespace

DenseMatrix assemble_stiffness(const Mesh& m, const FracParams& p, const QuadratureSpec& q, unsigned threads) {
  q.validate();
  if (p.d != m.dim()) throw InputError("assemble_stiffness: parameter dimension differs from mesh dimension");
  if (!(p.s > 0.0 && p.s < 1.0)) throw InputError("assemble_stiffness: s must lie in (0,1)");
  const std::size_t n = m.num_dofs();
  if (n == 0) throw InputError("assemble_stiffness: mesh has no interior degrees of freedom");
  const int d = m.dim();
  const int nloc = d + 1;
  const std::size_t ne = m.num_elements();
  const auto elems = collect_elements(m);
  const double expo = 0.5 * d + p.s;

  // vertex -> elements (domain and exterior)
  std::vector<std::vector<std::size_t>> incident(m.num_vertices() + m.exterior_vertices().size());
  for (std::size_t k = 0; k < elems.size(); ++k)
    for (int a = 0; a < nloc; ++a) incident[elems[k].id[a]].push_back(k);

  // Cross-term rules, tabulated per element. Pairs that are close relative
  // to their size get a finer tier.
  std::vector<CrossRule> tiers;
  for (int extra : {0, 2, 4}) tiers.emplace_back(elems, ne, d, q.gauss_order + extra);
  std::vector<Box> boxes(ne);
  std::vector<double> diam(ne);
  for (std::size_t k = 0; k < ne; ++k) {
    boxes[k] = Box::empty(d);
    for (int a = 0; a < nloc; ++a) boxes[k].extend(elems[k].p[a]);
    diam[k] = boxes[k].diameter();
  }
  auto tier_of = [&](std::size_t K, std::size_t Kp) -> const CrossRule& {
    const double rho = distance(boxes[K], boxes[Kp]) / std::max(diam[K], diam[Kp]);
    if (rho < kNearRatio) return tiers[2];
    if (rho < kMidRatio) return tiers[1];
    return tiers[0];
  };
  const SimplexRule self_rule = simplex_rule(d, q.complement_order);
  const ExteriorKernel exterior(p.s);

  auto element_work = [&](std::size_t K, TouchingPairIntegrator& touching, std::vector<Triplet>& out) {
    const Element& eK = elems[K];
    std::vector<std::size_t> patch;
    for (int a = 0; a < nloc; ++a) patch.insert(patch.end(), incident[eK.id[a]].begin(), incident[eK.id[a]].end());
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());

    // Touching pairs; each unordered pair of distinct elements counts twice.
    for (std::size_t Kp : patch) {
      if (Kp == K) {
        touching.integrate(eK, K, eK, K, 1.0, out);
      } else if (Kp > K) {
        touching.integrate(eK, K, elems[Kp], Kp, 2.0, out);
      }
    }

    // psi_i(x) psi_j(x) times the kernel integrated over everything outside the patch.
    const auto facets = patch_boundary(d, elems, patch, centroid(eK, d));
    std::array<double, 9> self{};
    for (std::size_t l = 0; l < self_rule.size(); ++l) {
      const Point x = map_point(eK, d, self_rule.points[l]);
      const auto b = ref_bary(d, self_rule.points[l]);
      double weight = 0.0;
      for (const auto& f : facets) weight += exterior(d, f, x);
      const double w = 2.0 * self_rule.weights[l] * eK.jac * weight;
      for (int a = 0; a < nloc; ++a)
        for (int c = a; c < nloc; ++c) self[a * 3 + c] += w * b[a] * b[c];
    }
    for (int a = 0; a < nloc; ++a)
      for (int c = a; c < nloc; ++c) {
        if (eK.dof[a] < 0 || eK.dof[c] < 0) continue;
        if (!std::isfinite(self[a * 3 + c]))
          throw NumericalError("assembly: non-finite exterior weight on element " + std::to_string(K));
        const auto gi = static_cast<std::uint32_t>(std::min(eK.dof[a], eK.dof[c]));
        const auto gj = static_cast<std::uint32_t>(std::max(eK.dof[a], eK.dof[c]));
        out.push_back({gi, gj, self[a * 3 + c]});
      }

    // Cross terms -psi_i(x) psi_j(y) for domain elements without a common vertex.
    bool any_dof = false;
    for (int a = 0; a < nloc; ++a) any_dof = any_dof || eK.dof[a] >= 0;
    if (!any_dof) return;
    std::vector<double> tmp;
    auto in_patch = [&](std::size_t Kp) { return std::binary_search(patch.begin(), patch.end(), Kp); };
    for (std::size_t Kp = K + 1; Kp < ne; ++Kp) {
      const Element& eP = elems[Kp];
      bool dofs = false;
      for (int b = 0; b < nloc; ++b) dofs = dofs || eP.dof[b] >= 0;
      if (!dofs || in_patch(Kp)) continue;
      const CrossRule& r = tier_of(K, Kp);
      const std::size_t nq = r.nq;
      const Point* xk = &r.pts[K * nq];
      const double* wk = &r.w[K * nq];
      const Point* yl = &r.pts[Kp * nq];
      const double* wl = &r.w[Kp * nq];
      const double* bary = r.bary.data();
      tmp.assign(nq * 3, 0.0);
      for (std::size_t k = 0; k < nq; ++k) {
        double t0 = 0.0, t1 = 0.0, t2 = 0.0;
        for (std::size_t l = 0; l < nq; ++l) {
          const double w = wl[l] * std::pow(dist2(xk[k], yl[l]), -expo);
          t0 += w * bary[l];
          t1 += w * bary[nq + l];
          if (d == 2) t2 += w * bary[2 * nq + l];
        }
        tmp[k * 3 + 0] = wk[k] * t0;
        tmp[k * 3 + 1] = wk[k] * t1;
        tmp[k * 3 + 2] = wk[k] * t2;
      }
      for (int a = 0; a < nloc; ++a) {
        if (eK.dof[a] < 0) continue;
        for (int b = 0; b < nloc; ++b) {
          if (eP.dof[b] < 0) continue;
          double g = 0.0;
          for (std::size_t k = 0; k < nq; ++k) g += bary[a * nq + k] * tmp[k * 3 + b];
          if (!std::isfinite(g))
            throw NumericalError("assembly: non-finite quadrature value for element pair (" + std::to_string(K) +
                                 ", " + std::to_string(Kp) + ")");
          const auto gi = static_cast<std::uint32_t>(std::min(eK.dof[a], eP.dof[b]));
          const auto gj = static_cast<std::uint32_t>(std::max(eK.dof[a], eP.dof[b]));
          out.push_back({gi, gj, -2.0 * g});
        }
      }
    }
  };

  // Fixed batches: per-element triplet lists are computed in parallel and
  // scattered serially in element order, so every entry sees the same
  // summation order whatever the thread count.
  constexpr std::size_t kBatch = 32;
  DenseMatrix a(n, n);
  std::vector<std::vector<Triplet>> slots(kBatch);
  const unsigned nthreads = resolve_threads(threads);
  std::vector<TouchingPairIntegrator> integrators(kBatch, TouchingPairIntegrator(d, p.s, q.singular_order));
  for (std::size_t start = 0; start < ne; start += kBatch) {
    const std::size_t count = std::min(kBatch, ne - start);
    parallel_for(count, nthreads, [&](std::size_t b) {
      slots[b].clear();
      element_work(start + b, integrators[b], slots[b]);
    });
    for (std::size_t b = 0; b < count; ++b)
      for (const auto& t : slots[b]) a(t.i, t.j) += t.v;
  }
  const double factor = 0.5 * p.c_ds;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      a(i, j) *= factor;
      a(j, i) = a(i, j);
    }
  return a;
}

std::vector<double> load_vector(const Mesh& m, const std::function<double(const Point&)>& f,
                                const QuadratureSpec& q) {
  q.validate();
  const int d = m.dim();
  const auto elems = collect_elements(m);
  const SimplexRule rule = simplex_rule(d, q.gauss_order);
  std::vector<double> b(m.num_dofs(), 0.0);
  for (std::size_t k = 0; k < m.num_elements(); ++k) {
    const Element& e = elems[k];
    for (std::size_t l = 0; l < rule.size(); ++l) {
      const double fx = f(map_point(e, d, rule.points[l]));
      if (!std::isfinite(fx)) throw NumericalError("load_vector: non-finite source value");
      const auto bary = ref_bary(d, rule.points[l]);
      for (int a = 0; a <= d; ++a)
        if (e.dof[a] >= 0) b[static_cast<std::size_t>(e.dof[a])] += rule.weights[l] * e.jac * fx * bary[a];
    }
  }
  return b;
}

}  // namespace fraclap
