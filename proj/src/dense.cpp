#include "fraclap/dense.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "fraclap/error.hpp"

namespace fraclap {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw InputError("DenseMatrix: data length does not match rows*cols");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::gather(std::span<const std::size_t> row_idx,
                                std::span<const std::size_t> col_idx) const {
  DenseMatrix out(row_idx.size(), col_idx.size());
  for (std::size_t i = 0; i < row_idx.size(); ++i) {
    const double* src = data_.data() + row_idx[i] * cols_;
    double* dst = out.data_.data() + i * col_idx.size();
    for (std::size_t j = 0; j < col_idx.size(); ++j) dst[j] = src[col_idx[j]];
  }
  return out;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InputError("matrix product: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("matrix difference: shape mismatch");
  DenseMatrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < cd.size(); ++k) cd[k] -= bd[k];
  return c;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw InputError("matvec: length mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < ai.size(); ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<double> matvec_transposed(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw InputError("matvec_transposed: length mismatch");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < ai.size(); ++j) y[j] += ai[j] * xi;
  }
  return y;
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

namespace {

constexpr std::array<char, 8> kMagic = {'F', 'R', 'A', 'C', 'M', 'A', 'T', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw InputError("FRACMAT1: unexpected end of file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_fracmat(std::ostream& os, const DenseMatrix& m) {
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(os, m.rows());
  put_le<std::uint64_t>(os, m.cols());
  for (double v : m.data()) put_le<double>(os, v);
}

DenseMatrix read_fracmat(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw InputError("FRACMAT1: bad magic");
  const auto rows = get_le<std::uint64_t>(is);
  const auto cols = get_le<std::uint64_t>(is);
  std::vector<double> data(rows * cols);
  for (auto& v : data) v = get_le<double>(is);
  return DenseMatrix(rows, cols, std::move(data));
}

void save_fracmat(const std::string& path, const DenseMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path + " for writing");
  write_fracmat(os, m);
  if (!os) throw InputError("write failed: " + path);
}

DenseMatrix load_fracmat(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path);
  return read_fracmat(is);
}

}  // namespace fraclap
