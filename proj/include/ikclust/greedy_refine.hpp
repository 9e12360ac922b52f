#pragma once

#include <optional>
#include <vector>

#include "ikclust/kernel_kmeans.hpp"
#include "ikclust/tree.hpp"

namespace ikclust {

enum class RefineObjective { exkmc, expand };

struct RefineOptions {
  RefineObjective objective = RefineObjective::exkmc;
  CutMode cut_mode = CutMode::one_sided;
  // interval-mode candidate bounds come from at most this many
  // quantile-thinned unique values per coordinate
  int max_unique_values = 200;
};

// One evaluated split: objective value (kernel cost, or impurity count for
// the expand objective) plus the minimizing ordered pair of reference centers
// for the (left, right) children.
struct SplitScore {
  double cost = 0.0;
  int left_center = -1;
  int right_center = -1;
};

// Candidate axis cuts for a node: midpoints between consecutive unique
// coordinate values of the node's data. one_sided yields thresholds
// (-inf, mid]; interval additionally yields every pair [mid_a, mid_b].
std::vector<IntervalCut> split_candidates(const Matrix& points,
                                          const std::vector<int>& node_points, CutMode mode,
                                          int max_unique_values = 200);

// min over ordered center pairs (j, l) of
//   sum_{x in left} ||psi(x) - c_j||^2 + sum_{x in right} ||psi(x) - c_l||^2
// with distances against the fixed reference clusters. Throws if a side is
// empty on node_points.
SplitScore exkmc_cut_cost(const GramMatrix& gram, const std::vector<int>& ref_labels,
                          const std::vector<int>& node_points, const Matrix& points,
                          const IntervalCut& cut);

// min over ordered center pairs (j, l) of
//   |{x in left : c(x) != c_j}| + |{x in right : c(x) != c_l}|
SplitScore expand_cut_cost(const std::vector<int>& ref_labels,
                           const std::vector<int>& node_points, const Matrix& points,
                           const IntervalCut& cut);

struct RefineResult {
  InterpretableTree tree;
  bool reached_target = true;  // false when no splittable leaf remained
};

// Grows the tree (a single all-data leaf when absent) to m leaves, greedily
// splitting the leaf with the largest gap between its no-split objective and
// its best split. New leaves take the cluster id of their minimizing
// reference center. Ties: larger gain, then shallower node, smaller
// coordinate, smaller lower bound, smaller upper bound.
RefineResult refine(const std::optional<InterpretableTree>& start, const GramMatrix& gram,
                    const Matrix& points, const std::vector<int>& ref_labels, int m,
                    const RefineOptions& options = {});

}  // namespace ikclust
