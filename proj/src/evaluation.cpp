#include "ikclust/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "ikclust/greedy_refine.hpp"
#include "ikclust/kernel_kmeans.hpp"

namespace ikclust {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double partition_cost_raw(const GramMatrix& gram, const std::vector<int>& labels, int blocks) {
  // same clamped kernel-trick evaluation as clustering_cost, without the
  // dense-label precondition
  const int n = gram.point_count();
  std::vector<double> within(blocks, 0.0);
  std::vector<int> sizes(blocks, 0);
  std::vector<double> cross(n, 0.0);
  for (int i = 0; i < n; ++i) ++sizes[labels[i]];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (labels[i] == labels[j]) {
        within[labels[i]] += gram.values(i, j);
        cross[i] += gram.values(i, j);
      }
    }
  }
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    double m = sizes[labels[i]];
    double d = gram.values(i, i) + within[labels[i]] / (m * m) - 2.0 * cross[i] / m;
    cost += std::max(0.0, d);
  }
  return cost;
}

void enumerate_partitions(const GramMatrix& gram, int k, std::vector<int>& labels, int index,
                          int used, double& best) {
  const int n = gram.point_count();
  if (index == n) {
    best = std::min(best, partition_cost_raw(gram, labels, used));
    return;
  }
  int limit = std::min(used + 1, k);
  for (int b = 0; b < limit; ++b) {
    labels[index] = b;
    enumerate_partitions(gram, k, labels, index + 1, std::max(used, b + 1), best);
  }
}

struct TreeSearch {
  const Matrix& points;
  const GramMatrix& gram;
  int k;
  CutMode cut_mode;
  double best_cost = kInf;
  std::vector<std::pair<int, IntervalCut>> best_splits;  // (leaf slot, cut)
  std::vector<std::pair<int, IntervalCut>> current;
  std::set<std::vector<int>> seen;

  void run(std::vector<std::vector<int>>& leaves) {
    std::vector<int> signature(points.rows());
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      for (int p : leaves[l]) signature[p] = static_cast<int>(l);
    }
    if (!seen.insert(signature).second) return;

    double cost = 0.0;
    {
      // leaves as clusters
      std::vector<int> labels = signature;
      cost = partition_cost_raw(gram, labels, static_cast<int>(leaves.size()));
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_splits = current;
    }
    if (static_cast<int>(leaves.size()) >= k) return;

    for (std::size_t l = 0; l < leaves.size(); ++l) {
      if (leaves[l].size() < 2) continue;
      for (const IntervalCut& cut : split_candidates(points, leaves[l], cut_mode)) {
        std::vector<int> inside, outside;
        for (int p : leaves[l]) {
          double v = points(p, cut.input_dim);
          (cut.lower <= v && v <= cut.upper ? inside : outside).push_back(p);
        }
        if (inside.empty() || outside.empty()) continue;
        std::vector<std::vector<int>> next;
        next.reserve(leaves.size() + 1);
        for (std::size_t o = 0; o < leaves.size(); ++o) {
          if (o != l) next.push_back(leaves[o]);
        }
        next.push_back(inside);
        next.push_back(outside);
        current.emplace_back(static_cast<int>(l), cut);
        run(next);
        current.pop_back();
      }
    }
  }
};

}  // namespace

double price_of_explainability(double tree_cost, double baseline_cost) {
  if (tree_cost < 0.0 || baseline_cost < 0.0) {
    throw std::invalid_argument("price_of_explainability: negative cost");
  }
  if (baseline_cost == 0.0) return tree_cost > 0.0 ? kInf : 1.0;
  return tree_cost / baseline_cost;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: length mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 2) throw std::invalid_argument("adjusted_rand_index: need at least 2 points");

  std::map<int, int> ids_a, ids_b;
  for (int v : a) ids_a.emplace(v, 0);
  for (int v : b) ids_b.emplace(v, 0);
  int next = 0;
  for (auto& [key, id] : ids_a) id = next++;
  next = 0;
  for (auto& [key, id] : ids_b) id = next++;

  const int ka = static_cast<int>(ids_a.size());
  const int kb = static_cast<int>(ids_b.size());
  std::vector<std::vector<long long>> table(ka, std::vector<long long>(kb, 0));
  std::vector<long long> rows(ka, 0), cols(kb, 0);
  for (int i = 0; i < n; ++i) {
    int ia = ids_a.at(a[i]);
    int ib = ids_b.at(b[i]);
    ++table[ia][ib];
    ++rows[ia];
    ++cols[ib];
  }
  auto comb2 = [](long long v) { return 0.5 * v * (v - 1); };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (int i = 0; i < ka; ++i) {
    sum_rows += comb2(rows[i]);
    for (int j = 0; j < kb; ++j) sum_cells += comb2(table[i][j]);
  }
  for (int j = 0; j < kb; ++j) sum_cols += comb2(cols[j]);
  double expected = sum_rows * sum_cols / comb2(n);
  double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (sum_cells - expected) / (max_index - expected);
}

std::vector<double> per_dimension_costs(const Matrix& points, const KernelSpec& spec,
                                        const std::vector<int>& labels) {
  if (!spec.product_family()) {
    throw std::invalid_argument("per_dimension_costs: requires a product kernel family");
  }
  std::vector<double> costs;
  costs.reserve(points.cols());
  for (int dim = 0; dim < points.cols(); ++dim) {
    costs.push_back(clustering_cost(component_gram_matrix(spec, points, dim), labels));
  }
  return costs;
}

double brute_force_optimal_cost(const GramMatrix& gram, int k) {
  const int n = gram.point_count();
  if (n > 14) throw std::invalid_argument("brute_force_optimal_cost: n too large (max 14)");
  if (k < 1 || k > n) throw std::invalid_argument("brute_force_optimal_cost: bad k");
  std::vector<int> labels(n, 0);
  double best = kInf;
  enumerate_partitions(gram, k, labels, 1, 1, best);  // point 0 pinned to block 0
  return best;
}

BestTreeResult brute_force_best_tree(const Matrix& points, const GramMatrix& gram, int k,
                                     CutMode cut_mode) {
  const int n = static_cast<int>(points.rows());
  if (n < 1 || k < 1) throw std::invalid_argument("brute_force_best_tree: empty instance");
  std::vector<int> everyone(n);
  for (int p = 0; p < n; ++p) everyone[p] = p;
  std::size_t root_candidates = split_candidates(points, everyone, cut_mode).size();
  // wide data is fine as long as the candidate space stays small (e.g. few
  // distinct values per coordinate)
  if (n > 12 || k > 3 || (points.cols() > 3 && root_candidates > 256)) {
    throw std::invalid_argument(
        "brute_force_best_tree: instance too large (n<=12, k<=3, d<=3 or few distinct cuts)");
  }

  TreeSearch search{points, gram, k, cut_mode};
  std::vector<std::vector<int>> leaves(1);
  for (int p = 0; p < n; ++p) leaves[0].push_back(p);
  search.run(leaves);

  // replay the winning split sequence into a tree; leaf slots follow the
  // same replacement order as the search (split leaf removed, children
  // appended)
  BestTreeResult result;
  result.cost = search.best_cost;
  result.tree = single_leaf_tree(0);
  std::vector<int> slot_nodes{0};
  for (const auto& [slot, cut] : search.best_splits) {
    int node_idx = slot_nodes[slot];
    slot_nodes.erase(slot_nodes.begin() + slot);
    TreeNode leaf;
    leaf.is_leaf = true;
    int left = static_cast<int>(result.tree.nodes.size());
    result.tree.nodes.push_back(leaf);
    int right = static_cast<int>(result.tree.nodes.size());
    result.tree.nodes.push_back(leaf);
    slot_nodes.push_back(left);
    slot_nodes.push_back(right);
    TreeNode& node = result.tree.nodes[node_idx];
    node.is_leaf = false;
    node.cut = cut;
    node.leaf_id = node.cluster_id = -1;
    node.left = left;
    node.right = right;
    result.tree.k_leaves += 1;
  }
  int next = 0;
  for (auto& node : result.tree.nodes) {
    if (node.is_leaf) {
      node.leaf_id = next;
      node.cluster_id = next;
      ++next;
    }
  }
  validate_tree(result.tree);
  return result;
}

}  // namespace ikclust
