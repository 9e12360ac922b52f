#pragma once

#include <vector>

#include "ikclust/kernels.hpp"
#include "ikclust/tree.hpp"

namespace ikclust {

// cost(T, X) / baseline. Returns the +infinity sentinel when the baseline is
// zero and the tree cost positive, and 1 when both are zero. Negative inputs
// are rejected.
double price_of_explainability(double tree_cost, double baseline_cost);

// Chance-corrected agreement between two labelings: 1 for identical
// partitions up to relabeling, expected 0 for independent random labelings.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

// Clustering cost of the partition under each one-dimensional component
// kernel K_i. Requires a product family.
std::vector<double> per_dimension_costs(const Matrix& points, const KernelSpec& spec,
                                        const std::vector<int>& labels);

// Exact minimum clustering cost over all partitions into at most k nonempty
// clusters, by enumeration. Guarded to n <= 14.
double brute_force_optimal_cost(const GramMatrix& gram, int k);

struct BestTreeResult {
  InterpretableTree tree;
  double cost = 0.0;
};

// Exhaustive minimum of the induced-partition cost over axis-aligned trees
// with up to k leaves, with candidate cuts at midpoints between consecutive
// data values (one-sided thresholds or intervals per cut_mode). Guarded to
// n <= 12, d <= 3, k <= 3.
BestTreeResult brute_force_best_tree(const Matrix& points, const GramMatrix& gram, int k,
                                     CutMode cut_mode);

}  // namespace ikclust
