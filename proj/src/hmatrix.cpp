#include "fraclap/hmatrix.hpp"

#include <filesystem>
#include <fstream>

#include "fraclap/error.hpp"
#include "fraclap/parallel.hpp"

namespace fraclap {

namespace {

void check_square(const DenseMatrix& m, const ClusterTree& t) {
  if (m.rows() != m.cols()) throw InputError("compress: matrix is not square");
  if (m.rows() != t.perm.size())
    throw InputError("compress: matrix dimension " + std::to_string(m.rows()) + " differs from cluster tree size " +
                     std::to_string(t.perm.size()));
}

DenseMatrix extract(const DenseMatrix& m, const ClusterTree& t, const Block& b) {
  return m.gather(t.indices(b.tau), t.indices(b.sigma));
}

HMatrix skeleton(const ClusterTree& t, const BlockPartition& p, std::size_t r) {
  HMatrix h;
  h.n = t.perm.size();
  h.rank = r;
  h.perm = t.perm;
  h.tree = t;
  h.partition = p;
  std::size_t nf = 0, nn = 0;
  for (const auto& b : p.blocks) {
    const auto& a = t.nodes[b.tau];
    const auto& s = t.nodes[b.sigma];
    h.blocks.push_back({a.begin, a.end, s.begin, s.end, b.admissible, b.admissible ? nf++ : nn++});
  }
  h.far.resize(nf);
  h.near.resize(nn);
  return h;
}

void fill_near(HMatrix& h, const DenseMatrix& m, const ClusterTree& t, const BlockPartition& p) {
  for (std::size_t k = 0; k < p.blocks.size(); ++k)
    if (!p.blocks[k].admissible) h.near[h.blocks[k].slot] = extract(m, t, p.blocks[k]);
}

// y_perm += B x_perm (or B^T) block by block, in partition order.
std::vector<double> apply(const HMatrix& h, std::span<const double> v, bool transposed) {
  if (v.size() != h.n) throw InputError("hmatvec: vector length differs from matrix dimension");
  std::vector<double> x(h.n), y(h.n, 0.0), tmp;
  for (std::size_t p = 0; p < h.n; ++p) x[p] = v[h.perm[p]];
  for (const auto& b : h.blocks) {
    const std::size_t r0 = transposed ? b.col_begin : b.row_begin;
    const std::size_t c0 = transposed ? b.row_begin : b.col_begin;
    if (b.admissible) {
      const LowRankFactor& f = h.far[b.slot];
      // Non-transposed: X (Y^T x); transposed: Y (X^T x).
      const DenseMatrix& in = transposed ? f.x : f.y;
      const DenseMatrix& out = transposed ? f.y : f.x;
      tmp.assign(f.rank(), 0.0);
      for (std::size_t i = 0; i < in.rows(); ++i) {
        const double xi = x[c0 + i];
        for (std::size_t k = 0; k < f.rank(); ++k) tmp[k] += in(i, k) * xi;
      }
      for (std::size_t i = 0; i < out.rows(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < f.rank(); ++k) s += out(i, k) * tmp[k];
        y[r0 + i] += s;
      }
    } else {
      const DenseMatrix& d = h.near[b.slot];
      if (!transposed) {
        for (std::size_t i = 0; i < d.rows(); ++i) {
          const auto row = d.row(i);
          double s = 0.0;
          for (std::size_t j = 0; j < d.cols(); ++j) s += row[j] * x[c0 + j];
          y[r0 + i] += s;
        }
      } else {
        for (std::size_t i = 0; i < d.rows(); ++i) {
          const auto row = d.row(i);
          const double xi = x[c0 + i];
          for (std::size_t j = 0; j < d.cols(); ++j) y[r0 + j] += row[j] * xi;
        }
      }
    }
  }
  std::vector<double> out(h.n);
  for (std::size_t p = 0; p < h.n; ++p) out[h.perm[p]] = y[p];
  return out;
}

}  // namespace

FarBlockSVDs far_block_svds(const DenseMatrix& m, const ClusterTree& t, const BlockPartition& p, unsigned threads) {
  check_square(m, t);
  std::vector<std::size_t> far;
  for (std::size_t k = 0; k < p.blocks.size(); ++k)
    if (p.blocks[k].admissible) far.push_back(k);
  FarBlockSVDs out;
  out.svds.resize(far.size());
  parallel_for(far.size(), resolve_threads(threads),
               [&](std::size_t i) { out.svds[i] = svd(extract(m, t, p.blocks[far[i]])); });
  return out;
}

HMatrix compress(const DenseMatrix& m, const ClusterTree& t, const BlockPartition& p, std::size_t r,
                 const FarBlockSVDs& svds) {
  check_square(m, t);
  if (r == 0) throw InputError("compress: rank must be at least 1");
  HMatrix h = skeleton(t, p, r);
  if (svds.svds.size() != h.far.size()) throw InputError("compress: SVD cache does not match the partition");
  for (std::size_t k = 0; k < h.far.size(); ++k) h.far[k] = truncate(svds.svds[k], r);
  fill_near(h, m, t, p);
  return h;
}

HMatrix compress(const DenseMatrix& m, const ClusterTree& t, const BlockPartition& p, std::size_t r,
                 unsigned threads) {
  check_square(m, t);
  if (r == 0) throw InputError("compress: rank must be at least 1");
  return compress(m, t, p, r, far_block_svds(m, t, p, threads));
}

std::vector<double> hmatvec(const HMatrix& h, std::span<const double> v) { return apply(h, v, false); }

std::vector<double> hmatvec_transposed(const HMatrix& h, std::span<const double> v) { return apply(h, v, true); }

NormEstimate approximation_error(const DenseMatrix& dense, const HMatrix& h, double tol, int max_iter) {
  if (dense.rows() != h.n || dense.cols() != h.n)
    throw InputError("approximation_error: matrix dimension differs from the H-matrix");
  auto diff = [&](bool transposed) {
    return [&, transposed](std::span<const double> in, std::span<double> out) {
      const auto a = transposed ? matvec_transposed(dense, in) : matvec(dense, in);
      const auto b = transposed ? hmatvec_transposed(h, in) : hmatvec(h, in);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
    };
  };
  return power_norm2(diff(false), diff(true), h.n, h.n, tol, max_iter);
}

std::size_t storage_bytes(const HMatrix& h) {
  std::size_t doubles = 0;
  for (const auto& b : h.blocks) {
    const std::size_t rows = b.row_end - b.row_begin, cols = b.col_end - b.col_begin;
    doubles += b.admissible ? h.far[b.slot].rank() * (rows + cols) : rows * cols;
  }
  return doubles * sizeof(double);
}

std::vector<std::vector<double>> block_singular_values(const DenseMatrix& m, const ClusterTree& t,
                                                       const BlockPartition& p, unsigned threads) {
  auto f = far_block_svds(m, t, p, threads);
  std::vector<std::vector<double>> out;
  out.reserve(f.svds.size());
  for (auto& s : f.svds) out.push_back(std::move(s.sigma));
  return out;
}

void save_hmatrix(const std::string& dir, const HMatrix& h) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream os(fs::path(dir) / "partition.csv", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (fs::path(dir) / "partition.csv").string());
    os << partition_csv(h.tree, h.partition);
  }
  for (std::size_t k = 0; k < h.far.size(); ++k) {
    save_fracmat((fs::path(dir) / ("far_" + std::to_string(k) + "_X")).string(), h.far[k].x);
    save_fracmat((fs::path(dir) / ("far_" + std::to_string(k) + "_Y")).string(), h.far[k].y);
  }
  for (std::size_t k = 0; k < h.near.size(); ++k)
    save_fracmat((fs::path(dir) / ("near_" + std::to_string(k))).string(), h.near[k]);
}

}  // namespace fraclap
