#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ikclust/kernels.hpp"
#include "ikclust/surrogate_features.hpp"

namespace ikclust {

// Candidate-cut style used by the greedy refinements and the exhaustive tree
// oracle: one-sided thresholds, or closed intervals and their complements.
enum class CutMode { one_sided, interval };

// The feature-space cut a translated node came from. le_goes_left records
// whether the phi <= theta side ended up as the left child.
struct FeatureCutTrace {
  int column = -1;
  double theta = 0.0;
  bool le_goes_left = true;
};

struct TreeNode {
  bool is_leaf = true;
  IntervalCut cut;                       // internal nodes
  int left = -1;
  int right = -1;
  int leaf_id = -1;                      // leaves, dense numbering
  int cluster_id = -1;                   // leaves
  std::optional<FeatureCutTrace> trace;  // internal nodes built from feature cuts
};

// Axis-aligned decision tree with interval cuts. nodes[0] is the root; every
// point of R^d reaches exactly one leaf. Builders normalize cuts so that the
// interval side goes left.
struct InterpretableTree {
  std::vector<TreeNode> nodes;
  int k_leaves = 0;
};

InterpretableTree single_leaf_tree(int cluster_id = 0);

// Routes a point to its leaf and returns that leaf's cluster id. Interval
// membership is closed: ties at either bound count as inside.
int predict(const InterpretableTree& tree, const Eigen::Ref<const Vector>& point);

// Leaf node index per point (routing only; ignores cluster ids).
std::vector<int> route_to_leaves(const InterpretableTree& tree, const Matrix& points);

// Cluster id per point.
std::vector<int> induced_partition(const InterpretableTree& tree, const Matrix& points);

// Node indices of leaves that receive no data.
std::vector<int> empty_leaves(const InterpretableTree& tree, const Matrix& points);

// Kernel k-means cost of the partition induced by the tree, with leaves
// sharing a cluster id merged into one cluster and empty leaves dropped.
double tree_cost(const InterpretableTree& tree, const GramMatrix& gram, const Matrix& points);

// Same, but each nonempty leaf is its own cluster.
double tree_cost_per_leaf(const InterpretableTree& tree, const GramMatrix& gram,
                          const Matrix& points);

enum class TreeFormat { json, dot, text };

std::string export_tree(const InterpretableTree& tree, TreeFormat format);
InterpretableTree import_tree(const std::string& json_text);

bool structurally_equal(const InterpretableTree& a, const InterpretableTree& b);

// Structural sanity: binary, acyclic, every branch pair present, leaf count
// matches k_leaves, interval bounds valid. Throws on violation.
void validate_tree(const InterpretableTree& tree);

}  // namespace ikclust
