#include "fraclap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fraclap/error.hpp"

namespace fraclap {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void rotate(std::span<double> p, std::span<double> q, double c, double s) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double a = p[k], b = q[k];
    p[k] = c * a - s * b;
    q[k] = s * a + c * b;
  }
}

double jacobi_tol(std::size_t len) { return 8.0 * static_cast<double>(std::max<std::size_t>(len, 1)) * kEps; }

// Squared norm below which a column is rounding noise of the whole matrix;
// such columns are not rotated (they would keep rotating on noise).
double noise_floor2(const DenseMatrix& w) {
  double frob2 = 0.0;
  for (double x : w.data()) frob2 += x * x;
  const double tol = jacobi_tol(w.cols());
  return tol * tol * frob2;
}

// Jacobi on the rows of w (the columns of a tall matrix); v accumulates the
// right rotations. Returns false if the sweep cap is hit.
bool jacobi_rows(DenseMatrix& w, DenseMatrix& v, double floor2) {
  const std::size_t n = w.rows();
  const double tol = jacobi_tol(w.cols());
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(w.row(p), w.row(p));
        const double beta = dot(w.row(q), w.row(q));
        const double gamma = dot(w.row(p), w.row(q));
        if (alpha <= floor2 || beta <= floor2 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(w.row(p), w.row(q), c, s);
        rotate(v.row(p), v.row(q), c, s);
      }
    if (!rotated) return true;
  }
  return false;
}

// Replaces column j of u (rows x k) by a unit vector orthogonal to columns 0..j-1.
void complete_column(DenseMatrix& u, std::size_t j) {
  const std::size_t m = u.rows();
  std::vector<double> cand(m);
  for (std::size_t e = 0; e < m; ++e) {
    std::fill(cand.begin(), cand.end(), 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t c = 0; c < j; ++c) {
        double proj = 0.0;
        for (std::size_t i = 0; i < m; ++i) proj += u(i, c) * cand[i];
        for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * u(i, c);
      }
    // The squared residuals of all unit vectors sum to m - j, so one of them
    // passes this bound.
    const double nrm = norm2(cand);
    if (nrm * nrm >= 0.5 * static_cast<double>(m - j) / static_cast<double>(m)) {
      for (std::size_t i = 0; i < m; ++i) u(i, j) = cand[i] / nrm;
      return;
    }
  }
  throw NumericalError("svd: could not complete an orthonormal basis");
}

SVDResult svd_tall(const DenseMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  DenseMatrix w = a.transpose();  // row j = column j of a
  DenseMatrix v = DenseMatrix::identity(n);
  const double floor2 = noise_floor2(w);
  if (!jacobi_rows(w, v, floor2)) throw NumericalError("svd: no convergence after " + std::to_string(kMaxSweeps) + " sweeps");

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(w.row(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SVDResult r{DenseMatrix(m, n), std::vector<double>(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    r.sigma[k] = norms[j];
    for (std::size_t i = 0; i < n; ++i) r.v(i, k) = v(j, i);
    // Noise-level columns were never orthogonalised; their directions are
    // replaced by an orthonormal completion.
    if (norms[j] * norms[j] <= floor2 || norms[j] == 0.0) {
      complete_column(r.u, k);
    } else {
      for (std::size_t i = 0; i < m; ++i) r.u(i, k) = w(j, i) / norms[j];
    }
  }
  return r;
}

}  // namespace

DenseMatrix LowRankFactor::to_dense() const {
  DenseMatrix out(x.rows(), y.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < rank(); ++k) s += x(i, k) * y(j, k);
      out(i, j) = s;
    }
  return out;
}

DenseMatrix lu_invert(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw InputError("lu_invert: matrix is not square");
  const std::size_t n = a.rows();
  DenseMatrix lu = a;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const double scale = max_abs(a);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (!(std::abs(lu(piv, k)) > kEps * scale))
      throw NumericalError("lu_invert: matrix is singular to working precision at pivot " + std::to_string(k));
    if (piv != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(piv).begin());
      std::swap(perm[k], perm[piv]);
    }
    const double d = lu(k, k);
    const auto rk = lu.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const auto ri = lu.row(i);
      const double l = ri[k] / d;
      ri[k] = l;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  // Solve L U X = P I row by row.
  DenseMatrix x(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    xi[perm[i]] = 1.0;
    for (std::size_t k = 0; k < i; ++k) {
      const double l = lu(i, k);
      if (l == 0.0) continue;
      const auto xk = x.row(k);
      for (std::size_t j = 0; j < n; ++j) xi[j] -= l * xk[j];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto xi = x.row(i);
    for (std::size_t k = i + 1; k < n; ++k) {
      const double u = lu(i, k);
      if (u == 0.0) continue;
      const auto xk = x.row(k);
      for (std::size_t j = 0; j < n; ++j) xi[j] -= u * xk[j];
    }
    const double d = lu(i, i);
    for (std::size_t j = 0; j < n; ++j) xi[j] /= d;
  }
  return x;
}

double inversion_residual(const DenseMatrix& a, const DenseMatrix& inv) {
  DenseMatrix r = a * inv;
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) -= 1.0;
  return max_abs(r);
}

SVDResult svd(const DenseMatrix& a) {
  if (a.rows() >= a.cols()) return svd_tall(a);
  SVDResult t = svd_tall(a.transpose());
  std::swap(t.u, t.v);
  return t;
}

LowRankFactor truncate(const SVDResult& s, std::size_t r) {
  if (r == 0) throw InputError("truncated_svd: rank must be at least 1");
  r = std::min(r, s.sigma.size());
  LowRankFactor f{DenseMatrix(s.u.rows(), r), DenseMatrix(s.v.rows(), r)};
  for (std::size_t i = 0; i < s.u.rows(); ++i)
    for (std::size_t k = 0; k < r; ++k) f.x(i, k) = s.u(i, k) * s.sigma[k];
  for (std::size_t i = 0; i < s.v.rows(); ++i)
    for (std::size_t k = 0; k < r; ++k) f.y(i, k) = s.v(i, k);
  return f;
}

LowRankFactor truncated_svd(const DenseMatrix& a, std::size_t r) {
  if (r == 0) throw InputError("truncated_svd: rank must be at least 1");
  return truncate(svd(a), r);
}

NormEstimate power_norm2(const LinearMap& apply, const LinearMap& apply_t, std::size_t rows, std::size_t cols,
                         double tol, int max_iter) {
  if (cols == 0 || rows == 0) return {0.0, true, 0};
  if (!(tol > 0.0) || max_iter < 1) throw InputError("power_norm2: tol must be positive and max_iter at least 1");
  std::vector<double> x(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
  std::vector<double> y(rows), z(cols);
  NormEstimate est;
  bool restarted = false;
  double prev = -1.0, prev_delta = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    apply(x, y);
    const double value = norm2(y);
    apply_t(y, z);
    const double zn = norm2(z);
    est.iterations = it;
    if (zn == 0.0) {
      // The start vector lies in the null space of D; try once with an
      // alternating-sign vector before reporting a zero operator.
      if (restarted || it > 1) {
        est.value = std::max(est.value, value);
        est.converged = true;
        return est;
      }
      restarted = true;
      for (std::size_t k = 0; k < cols; ++k) x[k] = (k % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(cols));
      continue;
    }
    est.value = value;
    if (prev >= 0.0) {
      // Estimates approach sigma_1 geometrically with ratio q, so the distance
      // still to go is about delta q / (1 - q). Changes at rounding level
      // cannot be resolved further.
      const double delta = std::abs(value - prev);
      const double q = prev_delta > 0.0 ? delta / prev_delta : 1.0;
      const bool tail_small = q < 1.0 && delta * q < tol * value * (1.0 - q);
      if (delta <= 8.0 * std::numeric_limits<double>::epsilon() * value ||
          (delta < tol * value && tail_small)) {
        est.converged = true;
        return est;
      }
      prev_delta = delta;
    }
    prev = value;
    for (std::size_t k = 0; k < cols; ++k) x[k] = z[k] / zn;
  }
  return est;
}

}  // namespace fraclap
