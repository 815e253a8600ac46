#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fraclap {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  DenseMatrix transpose() const;

  /// Sub-matrix gathered through row and column index lists.
  DenseMatrix gather(std::span<const std::size_t> row_idx,
                     std::span<const std::size_t> col_idx) const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

/// y = A x
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);
/// y = A^T x
std::vector<double> matvec_transposed(const DenseMatrix& a, std::span<const double> x);

double max_abs(const DenseMatrix& a);
double norm2(std::span<const double> v);

/// FRACMAT1 binary format: 8-byte magic, u64 rows, u64 cols (little endian),
/// then rows*cols little-endian IEEE-754 doubles in row-major order.
void write_fracmat(std::ostream& os, const DenseMatrix& m);
DenseMatrix read_fracmat(std::istream& is);
void save_fracmat(const std::string& path, const DenseMatrix& m);
DenseMatrix load_fracmat(const std::string& path);

}  // namespace fraclap
