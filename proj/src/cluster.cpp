#include "fraclap/cluster.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "fraclap/error.hpp"

namespace fraclap {

namespace {

struct Builder {
  std::span<const Box> supports;
  std::size_t n_leaf;
  ClusterTree& tree;

  double center(std::size_t dof, int axis) const {
    return 0.5 * (supports[dof].lower[axis] + supports[dof].upper[axis]);
  }

  void build(std::size_t node) {
    ClusterNode& c = tree.nodes[node];
    c.box = Box::empty(supports[tree.perm[c.begin]].dim);
    for (std::size_t k = c.begin; k < c.end; ++k) c.box.extend(supports[tree.perm[k]]);
    if (c.size() <= n_leaf) return;

    int axis = 0;
    for (int k = 1; k < c.box.dim; ++k)
      if (c.box.side(k) > c.box.side(axis)) axis = k;
    const auto first = tree.perm.begin() + static_cast<std::ptrdiff_t>(c.begin);
    const auto last = tree.perm.begin() + static_cast<std::ptrdiff_t>(c.end);
    double cut = c.box.center()[axis];
    auto lower = [&](std::size_t dof) { return center(dof, axis) <= cut; };
    auto mid = std::stable_partition(first, last, lower);
    if (mid == first || mid == last) {
      std::vector<double> centers;
      for (auto it = first; it != last; ++it) centers.push_back(center(*it, axis));
      std::sort(centers.begin(), centers.end());
      cut = centers[(centers.size() - 1) / 2];
      mid = std::stable_partition(first, last, lower);
      // All centres coincide: split the range in half.
      if (mid == last) mid = first + static_cast<std::ptrdiff_t>(c.size() / 2);
    }
    const std::size_t split = static_cast<std::size_t>(mid - tree.perm.begin());
    const std::size_t begin = c.begin, end = c.end;
    const int level = c.level;
    for (int k = 0; k < 2; ++k) {
      ClusterNode child;
      child.begin = k == 0 ? begin : split;
      child.end = k == 0 ? split : end;
      child.level = level + 1;
      tree.nodes[node].children[k] = static_cast<std::int64_t>(tree.nodes.size());
      tree.nodes.push_back(child);
    }
    const auto c0 = static_cast<std::size_t>(tree.nodes[node].children[0]);
    const auto c1 = static_cast<std::size_t>(tree.nodes[node].children[1]);
    build(c0);
    build(c1);
  }
};

void descend(const ClusterTree& t, std::size_t tau, std::size_t sigma, double eta, std::vector<Block>& out) {
  const ClusterNode& a = t.nodes[tau];
  const ClusterNode& b = t.nodes[sigma];
  if (is_admissible(a.box, b.box, eta)) {
    out.push_back({tau, sigma, true});
    return;
  }
  if (a.is_leaf() && b.is_leaf()) {
    out.push_back({tau, sigma, false});
    return;
  }
  if (a.is_leaf()) {
    for (auto c : b.children) descend(t, tau, static_cast<std::size_t>(c), eta, out);
  } else if (b.is_leaf()) {
    for (auto c : a.children) descend(t, static_cast<std::size_t>(c), sigma, eta, out);
  } else {
    for (auto ca : a.children)
      for (auto cb : b.children) descend(t, static_cast<std::size_t>(ca), static_cast<std::size_t>(cb), eta, out);
  }
}

}  // namespace

int ClusterTree::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.level);
  return d;
}

ClusterTree build_cluster_tree(std::span<const Box> supports, std::size_t n_leaf) {
  if (n_leaf == 0) throw InputError("build_cluster_tree: n_leaf must be positive");
  if (supports.empty()) throw InputError("build_cluster_tree: no degrees of freedom");
  ClusterTree t;
  t.leaf_size = n_leaf;
  t.perm.resize(supports.size());
  std::iota(t.perm.begin(), t.perm.end(), 0);
  ClusterNode root;
  root.begin = 0;
  root.end = supports.size();
  t.nodes.push_back(root);
  Builder{supports, n_leaf, t}.build(0);
  return t;
}

ClusterTree build_cluster_tree(const Mesh& m, std::size_t n_leaf) {
  const auto boxes = support_boxes(m);
  return build_cluster_tree(boxes, n_leaf);
}

bool is_admissible(const Box& b1, const Box& b2, double eta) {
  if (!(eta > 0.0)) throw InputError("is_admissible: eta must be positive");
  const double dist = distance(b1, b2);
  return dist > 0.0 && std::max(b1.diameter(), b2.diameter()) <= eta * dist;
}

std::size_t BlockPartition::num_far() const {
  return static_cast<std::size_t>(std::count_if(blocks.begin(), blocks.end(), [](const Block& b) { return b.admissible; }));
}

std::size_t BlockPartition::num_near() const { return blocks.size() - num_far(); }

BlockPartition build_partition(const ClusterTree& t, double eta) {
  if (!(eta > 0.0)) throw InputError("build_partition: eta must be positive");
  if (t.nodes.empty()) throw InputError("build_partition: empty cluster tree");
  BlockPartition p;
  p.eta = eta;
  descend(t, 0, 0, eta, p.blocks);
  return p;
}

std::size_t sparsity_constant(const BlockPartition& p) {
  std::map<std::size_t, std::size_t> rows, cols;
  for (const auto& b : p.blocks)
    if (b.admissible) {
      ++rows[b.tau];
      ++cols[b.sigma];
    }
  std::size_t c = 0;
  for (const auto& [k, v] : rows) c = std::max(c, v);
  for (const auto& [k, v] : cols) c = std::max(c, v);
  return c;
}

std::string partition_csv(const ClusterTree& t, const BlockPartition& p) {
  std::ostringstream os;
  os << "tau_lo,tau_hi,sigma_lo,sigma_hi,admissible\n";
  for (const auto& b : p.blocks) {
    const auto& a = t.nodes[b.tau];
    const auto& s = t.nodes[b.sigma];
    os << a.begin << ',' << a.end << ',' << s.begin << ',' << s.end << ',' << (b.admissible ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace fraclap
