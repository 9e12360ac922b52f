#pragma once

#include <utility>
#include <vector>

#include "ikclust/kernels.hpp"

namespace ikclust {

struct FeatureCut {
  int column = -1;
  double theta = 0.0;
  int mistakes = 0;
};

// Node of the feature-space tree grown by imm_build. Point and center index
// sets are kept for invariant checks and for translating cuts back to the
// input space.
struct FeatureTreeNode {
  bool is_leaf = false;
  FeatureCut cut;            // internal nodes
  int left = -1;
  int right = -1;
  int center_id = -1;        // leaves: the single remaining center
  std::vector<int> points;   // dataset indices reaching this node
  std::vector<int> centers;  // center ids reaching this node
};

struct FeatureTree {
  std::vector<FeatureTreeNode> nodes;  // nodes[0] is the root
  int k = 0;
};

// Points of node_points whose own center is still in node_centers and that a
// threshold cut (column, theta) would separate from it. Sides are
// value <= theta versus value > theta.
int count_mistakes(const Matrix& features, const std::vector<int>& labels,
                   const Matrix& centers, const std::vector<int>& node_points,
                   const std::vector<int>& node_centers, int column, double theta);

// Midpoints between consecutive distinct projected center values, per column.
// Every returned cut splits node_centers into two nonempty sets. Throws when
// the centers coincide in every column.
std::vector<std::pair<int, double>> candidate_cuts(const Matrix& centers,
                                                   const std::vector<int>& node_centers);

// Top-down mistake minimization over the candidate cuts: grows a binary tree
// with exactly one center per leaf, choosing the minimum-mistake cut at every
// node (ties: smallest column, then smallest theta). Separated points keep
// flowing down the tree; they just stop counting as potential mistakes.
// labels[i] is the center id of point i.
FeatureTree imm_build(const Matrix& features, const std::vector<int>& labels,
                      const Matrix& centers);

// Re-checks, for every node: the leaf/center bijection, mistake minimality of
// the chosen cut against a full candidate re-scan, and the per-column mistake
// lower bound t(u) * max_{a,b} (a_i - b_i)^2 <= 4k * sum_{x correct} (x_i - c_i(x))^2.
// Throws with a description on the first violation.
void verify_imm_tree(const Matrix& features, const std::vector<int>& labels,
                     const Matrix& centers, const FeatureTree& tree);

}  // namespace ikclust
