#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fraclap/cluster.hpp"
#include "fraclap/dense.hpp"
#include "fraclap/linalg.hpp"

namespace fraclap {

/// Blockwise rank-r matrix over a block partition. Block k of the partition
/// covers rows [row_begin, row_end) and columns [col_begin, col_end) of the
/// matrix permuted by the cluster tree; far blocks hold X Y^T, near blocks are
/// stored exactly.
struct HMatrix {
  struct BlockRange {
    std::size_t row_begin, row_end, col_begin, col_end;
    bool admissible;
    std::size_t slot;  // index into far or near
  };

  std::size_t n = 0;
  std::size_t rank = 0;
  std::vector<std::size_t> perm;  // perm[position] = original index
  std::vector<BlockRange> blocks;
  std::vector<LowRankFactor> far;
  std::vector<DenseMatrix> near;
  ClusterTree tree;
  BlockPartition partition;
};

/// SVDs of all far blocks of a matrix, in partition order. Computing them once
/// lets a rank sweep reuse the decompositions.
struct FarBlockSVDs {
  std::vector<SVDResult> svds;
};

FarBlockSVDs far_block_svds(const DenseMatrix& m, const ClusterTree& t, const BlockPartition& p, unsigned threads = 0);

/// Far blocks truncated to rank min(r, block dims), near blocks copied.
HMatrix compress(const DenseMatrix& m, const ClusterTree& t, const BlockPartition& p, std::size_t r,
                 unsigned threads = 0);
HMatrix compress(const DenseMatrix& m, const ClusterTree& t, const BlockPartition& p, std::size_t r,
                 const FarBlockSVDs& svds);

std::vector<double> hmatvec(const HMatrix& h, std::span<const double> v);
std::vector<double> hmatvec_transposed(const HMatrix& h, std::span<const double> v);

/// Spectral norm of dense - h by power iteration on the difference operator.
NormEstimate approximation_error(const DenseMatrix& dense, const HMatrix& h, double tol = 1e-8, int max_iter = 500);

/// 8 bytes per stored double: r(|tau| + |sigma|) per far block, |tau||sigma| per near block.
std::size_t storage_bytes(const HMatrix& h);

/// Singular values of every far block, in partition order.
std::vector<std::vector<double>> block_singular_values(const DenseMatrix& m, const ClusterTree& t,
                                                       const BlockPartition& p, unsigned threads = 0);

/// Writes partition.csv and far_<k>_X, far_<k>_Y, near_<k> FRACMAT1 files,
/// numbering far and near blocks separately in partition order.
void save_hmatrix(const std::string& dir, const HMatrix& h);

}  // namespace fraclap
