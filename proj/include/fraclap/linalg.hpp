#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fraclap/dense.hpp"

namespace fraclap {

/// Rank-r factorisation X Y^T of a |tau| x |sigma| block.
struct LowRankFactor {
  DenseMatrix x;  // rows x r
  DenseMatrix y;  // cols x r

  std::size_t rank() const { return x.cols(); }
  DenseMatrix to_dense() const;
};

/// Thin SVD A = U diag(sigma) V^T with k = min(rows, cols) columns,
/// singular values in non-increasing order.
struct SVDResult {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;
};

/// Inverse by LU with partial pivoting. Throws NumericalError naming the
/// pivot if the matrix is singular to working precision.
DenseMatrix lu_invert(const DenseMatrix& a);

/// max |A * inv - I|.
double inversion_residual(const DenseMatrix& a, const DenseMatrix& inv);

/// One-sided Jacobi SVD. Throws NumericalError after 100 sweeps.
SVDResult svd(const DenseMatrix& a);

/// Best rank-r approximation (X = U_r diag(sigma_r), Y = V_r). r is clipped to
/// min(rows, cols); r = 0 is rejected.
LowRankFactor truncated_svd(const DenseMatrix& a, std::size_t r);
/// Same, from a precomputed decomposition.
LowRankFactor truncate(const SVDResult& s, std::size_t r);

/// out = D in, with in of the operator's column count and out of its row count.
using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Largest singular value of D by power iteration on D^T D from the
/// normalised all-ones vector. Stops when successive estimates differ by less
/// than tol * estimate and the geometric extrapolation of the remaining
/// change is below tol * estimate as well; otherwise reports the last
/// estimate as unconverged.
NormEstimate power_norm2(const LinearMap& apply, const LinearMap& apply_t, std::size_t rows, std::size_t cols,
                         double tol = 1e-8, int max_iter = 500);

}  // namespace fraclap
