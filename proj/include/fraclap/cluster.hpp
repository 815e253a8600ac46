#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fraclap/geometry.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

/// A cluster owns the contiguous range [begin, end) of the tree permutation.
struct ClusterNode {
  std::size_t begin = 0;
  std::size_t end = 0;
  Box box;
  int level = 0;
  std::int64_t children[2] = {-1, -1};

  bool is_leaf() const { return children[0] < 0; }
  std::size_t size() const { return end - begin; }
};

struct ClusterTree {
  std::vector<ClusterNode> nodes;  // nodes[0] is the root
  std::vector<std::size_t> perm;   // perm[position] = dof
  std::size_t leaf_size = 0;

  int depth() const;
  std::span<const std::size_t> indices(std::size_t node) const {
    return std::span<const std::size_t>(perm).subspan(nodes[node].begin, nodes[node].size());
  }
};

/// Geometric bisection over the support boxes of the dofs. A cluster's box is
/// the union of its members' support boxes; it is halved across its longest
/// edge (lowest axis on ties) and members go to the lower child when their
/// support-box centre is <= the cut. If one side would be empty, the cut moves
/// to the median centre. Clusters with at most n_leaf members are leaves.
ClusterTree build_cluster_tree(std::span<const Box> supports, std::size_t n_leaf);
ClusterTree build_cluster_tree(const Mesh& m, std::size_t n_leaf);

/// max(diam b1, diam b2) <= eta * dist(b1, b2) with dist > 0.
bool is_admissible(const Box& b1, const Box& b2, double eta);

struct Block {
  std::size_t tau = 0;    // row cluster
  std::size_t sigma = 0;  // column cluster
  bool admissible = false;
};

struct BlockPartition {
  std::vector<Block> blocks;
  double eta = 0.0;

  std::size_t num_far() const;
  std::size_t num_near() const;
};

/// Descent from (root, root): admissible pairs become far blocks, leaf pairs
/// near blocks; otherwise every cluster of the pair that has children is split.
BlockPartition build_partition(const ClusterTree& t, double eta);

/// Largest number of far blocks sharing one row cluster or one column cluster.
std::size_t sparsity_constant(const BlockPartition& p);

/// Lines "tau_lo,tau_hi,sigma_lo,sigma_hi,admissible" with half-open ranges of
/// tree positions, preceded by that header line.
std::string partition_csv(const ClusterTree& t, const BlockPartition& p);

}  // namespace fraclap
