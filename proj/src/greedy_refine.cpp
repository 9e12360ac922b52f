#include "ikclust/greedy_refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ikclust {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int label_count(const std::vector<int>& labels) {
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("refine: negative reference label");
    k = std::max(k, l + 1);
  }
  return k;
}

// objective value of each point against each reference center (n x k):
// kernel distances for exkmc, 0/1 misassignment indicators for expand
Matrix objective_table(const GramMatrix& gram, const std::vector<int>& ref_labels, int k,
                       RefineObjective objective) {
  const int n = gram.point_count();
  Matrix table(n, k);
  if (objective == RefineObjective::expand) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) table(i, j) = ref_labels[i] == j ? 0.0 : 1.0;
    }
    return table;
  }
  Matrix indicator = Matrix::Zero(n, k);
  std::vector<int> sizes(k, 0);
  for (int i = 0; i < n; ++i) {
    indicator(i, ref_labels[i]) = 1.0;
    ++sizes[ref_labels[i]];
  }
  Matrix cross = gram.values * indicator;
  for (int j = 0; j < k; ++j) {
    if (sizes[j] == 0) throw std::invalid_argument("refine: empty reference cluster");
    double within = cross.col(j).dot(indicator.col(j));
    double m = sizes[j];
    for (int i = 0; i < n; ++i) {
      table(i, j) = std::max(0.0, gram.values(i, i) + within / (m * m) - 2.0 * cross(i, j) / m);
    }
  }
  return table;
}

SplitScore score_split(const Matrix& table, const std::vector<int>& left,
                       const std::vector<int>& right) {
  const int k = static_cast<int>(table.cols());
  SplitScore score;
  double best_left = kInf, best_right = kInf;
  for (int j = 0; j < k; ++j) {
    double sum_left = 0.0, sum_right = 0.0;
    for (int p : left) sum_left += table(p, j);
    for (int p : right) sum_right += table(p, j);
    if (sum_left < best_left) {
      best_left = sum_left;
      score.left_center = j;
    }
    if (sum_right < best_right) {
      best_right = sum_right;
      score.right_center = j;
    }
  }
  score.cost = best_left + best_right;
  return score;
}

struct LeafState {
  int node_idx = -1;
  int depth = 0;
  std::vector<int> points;
  int no_split_center = -1;
  double no_split = 0.0;
  bool splittable = false;
  IntervalCut cut;
  SplitScore score;
  double gain = -kInf;
};

bool cut_before(const IntervalCut& a, const IntervalCut& b) {
  if (a.input_dim != b.input_dim) return a.input_dim < b.input_dim;
  if (a.lower != b.lower) return a.lower < b.lower;
  return a.upper < b.upper;
}

// evaluates every candidate cut of one leaf with per-coordinate prefix sums
void find_best_split(LeafState& leaf, const Matrix& points, const Matrix& table,
                     CutMode mode, int max_unique_values) {
  const int k = static_cast<int>(table.cols());
  const int s = static_cast<int>(leaf.points.size());

  leaf.no_split = kInf;
  for (int j = 0; j < k; ++j) {
    double total = 0.0;
    for (int p : leaf.points) total += table(p, j);
    if (total < leaf.no_split) {
      leaf.no_split = total;
      leaf.no_split_center = j;
    }
  }

  leaf.splittable = false;
  leaf.gain = -kInf;
  if (s < 2) return;

  std::vector<int> order(leaf.points);
  std::vector<double> prefix((s + 1) * k);
  for (int dim = 0; dim < points.cols(); ++dim) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return points(a, dim) < points(b, dim);
    });
    for (int j = 0; j < k; ++j) prefix[j] = 0.0;
    for (int t = 0; t < s; ++t) {
      for (int j = 0; j < k; ++j) {
        prefix[(t + 1) * k + j] = prefix[t * k + j] + table(order[t], j);
      }
    }
    // boundaries between distinct consecutive values
    std::vector<int> positions;    // prefix length at each boundary
    std::vector<double> midpoints;
    for (int t = 0; t + 1 < s; ++t) {
      double a = points(order[t], dim);
      double b = points(order[t + 1], dim);
      if (a < b) {
        positions.push_back(t + 1);
        midpoints.push_back(0.5 * (a + b));
      }
    }
    const int q = static_cast<int>(positions.size());
    if (q == 0) continue;

    std::vector<int> selected(q);
    for (int i = 0; i < q; ++i) selected[i] = i;
    if (mode == CutMode::interval && q > max_unique_values) {
      selected.clear();
      for (int i = 0; i < max_unique_values; ++i) {
        int idx = static_cast<int>((i + 0.5) * q / max_unique_values);
        if (selected.empty() || idx != selected.back()) selected.push_back(idx);
      }
    }

    auto consider = [&](int lo_pos, int hi_pos, const IntervalCut& cut) {
      // inside = sorted[lo_pos, hi_pos)
      SplitScore score;
      double best_in = kInf, best_out = kInf;
      for (int j = 0; j < k; ++j) {
        double inside = prefix[hi_pos * k + j] - prefix[lo_pos * k + j];
        double outside = prefix[s * k + j] - inside;
        if (inside < best_in) {
          best_in = inside;
          score.left_center = j;
        }
        if (outside < best_out) {
          best_out = outside;
          score.right_center = j;
        }
      }
      score.cost = best_in + best_out;
      double gain = leaf.no_split - score.cost;
      if (!leaf.splittable || gain > leaf.gain ||
          (gain == leaf.gain && cut_before(cut, leaf.cut))) {
        leaf.splittable = true;
        leaf.gain = gain;
        leaf.cut = cut;
        leaf.score = score;
      }
    };

    for (int bi : selected) {
      IntervalCut cut;
      cut.input_dim = dim;
      cut.upper = midpoints[bi];
      consider(0, positions[bi], cut);
    }
    if (mode == CutMode::interval) {
      for (std::size_t ai = 0; ai < selected.size(); ++ai) {
        for (std::size_t bi = ai + 1; bi < selected.size(); ++bi) {
          IntervalCut cut;
          cut.input_dim = dim;
          cut.lower = midpoints[selected[ai]];
          cut.upper = midpoints[selected[bi]];
          consider(positions[selected[ai]], positions[selected[bi]], cut);
        }
      }
    }
  }
}

}  // namespace

std::vector<IntervalCut> split_candidates(const Matrix& points,
                                          const std::vector<int>& node_points, CutMode mode,
                                          int max_unique_values) {
  std::vector<IntervalCut> cuts;
  for (int dim = 0; dim < points.cols(); ++dim) {
    std::vector<double> values;
    values.reserve(node_points.size());
    for (int p : node_points) values.push_back(points(p, dim));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const int q = static_cast<int>(values.size()) - 1;
    if (q < 1) continue;
    std::vector<double> mids(q);
    for (int i = 0; i < q; ++i) mids[i] = 0.5 * (values[i] + values[i + 1]);
    std::vector<int> selected(q);
    for (int i = 0; i < q; ++i) selected[i] = i;
    if (mode == CutMode::interval && q > max_unique_values) {
      selected.clear();
      for (int i = 0; i < max_unique_values; ++i) {
        int idx = static_cast<int>((i + 0.5) * q / max_unique_values);
        if (selected.empty() || idx != selected.back()) selected.push_back(idx);
      }
    }
    for (int bi : selected) {
      IntervalCut cut;
      cut.input_dim = dim;
      cut.upper = mids[bi];
      cuts.push_back(cut);
    }
    if (mode == CutMode::interval) {
      for (std::size_t ai = 0; ai < selected.size(); ++ai) {
        for (std::size_t bi = ai + 1; bi < selected.size(); ++bi) {
          IntervalCut cut;
          cut.input_dim = dim;
          cut.lower = mids[selected[ai]];
          cut.upper = mids[selected[bi]];
          cuts.push_back(cut);
        }
      }
    }
  }
  return cuts;
}

SplitScore exkmc_cut_cost(const GramMatrix& gram, const std::vector<int>& ref_labels,
                          const std::vector<int>& node_points, const Matrix& points,
                          const IntervalCut& cut) {
  int k = label_count(ref_labels);
  Matrix table = objective_table(gram, ref_labels, k, RefineObjective::exkmc);
  std::vector<int> left, right;
  for (int p : node_points) {
    double v = points(p, cut.input_dim);
    bool inside = cut.lower <= v && v <= cut.upper;
    (inside == cut.inside_goes_left ? left : right).push_back(p);
  }
  if (left.empty() || right.empty()) {
    throw std::invalid_argument("exkmc_cut_cost: cut leaves one side empty");
  }
  return score_split(table, left, right);
}

SplitScore expand_cut_cost(const std::vector<int>& ref_labels,
                           const std::vector<int>& node_points, const Matrix& points,
                           const IntervalCut& cut) {
  int k = label_count(ref_labels);
  GramMatrix dummy{Matrix::Zero(ref_labels.size(), ref_labels.size()), KernelSpec::linear_spec()};
  Matrix table = objective_table(dummy, ref_labels, k, RefineObjective::expand);
  std::vector<int> left, right;
  for (int p : node_points) {
    double v = points(p, cut.input_dim);
    bool inside = cut.lower <= v && v <= cut.upper;
    (inside == cut.inside_goes_left ? left : right).push_back(p);
  }
  if (left.empty() || right.empty()) {
    throw std::invalid_argument("expand_cut_cost: cut leaves one side empty");
  }
  return score_split(table, left, right);
}

RefineResult refine(const std::optional<InterpretableTree>& start, const GramMatrix& gram,
                    const Matrix& points, const std::vector<int>& ref_labels, int m,
                    const RefineOptions& options) {
  const int n = static_cast<int>(points.rows());
  if (n != gram.point_count() || n != static_cast<int>(ref_labels.size())) {
    throw std::invalid_argument("refine: size mismatch between points, gram and labels");
  }
  int k = label_count(ref_labels);
  Matrix table = objective_table(gram, ref_labels, k, options.objective);

  RefineResult result;
  std::vector<LeafState> leaves;

  if (start) {
    validate_tree(*start);
    result.tree = *start;
    auto leaf_nodes = route_to_leaves(result.tree, points);
    std::vector<int> depth(result.tree.nodes.size(), 0);
    for (std::size_t i = 0; i < result.tree.nodes.size(); ++i) {
      const auto& node = result.tree.nodes[i];
      if (!node.is_leaf) {
        depth[node.left] = depth[i] + 1;
        depth[node.right] = depth[i] + 1;
      }
    }
    for (std::size_t i = 0; i < result.tree.nodes.size(); ++i) {
      if (!result.tree.nodes[i].is_leaf) continue;
      LeafState leaf;
      leaf.node_idx = static_cast<int>(i);
      leaf.depth = depth[i];
      for (int p = 0; p < n; ++p) {
        if (leaf_nodes[p] == static_cast<int>(i)) leaf.points.push_back(p);
      }
      leaves.push_back(std::move(leaf));
    }
  } else {
    result.tree = single_leaf_tree(0);
    LeafState root;
    root.node_idx = 0;
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    root.points = std::move(all);
    leaves.push_back(std::move(root));
  }

  if (m < result.tree.k_leaves) {
    throw std::invalid_argument("refine: target leaf count below the current leaf count");
  }

  for (auto& leaf : leaves) {
    find_best_split(leaf, points, table, options.cut_mode, options.max_unique_values);
  }
  if (!start) {
    // a fresh root represents its minimizing reference cluster
    result.tree.nodes[0].cluster_id = leaves[0].no_split_center;
  }

  while (result.tree.k_leaves < m) {
    int chosen = -1;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (!leaves[i].splittable) continue;
      if (chosen < 0) {
        chosen = static_cast<int>(i);
        continue;
      }
      const LeafState& a = leaves[i];
      const LeafState& b = leaves[chosen];
      bool better = a.gain > b.gain ||
                    (a.gain == b.gain &&
                     (a.depth < b.depth || (a.depth == b.depth && cut_before(a.cut, b.cut))));
      if (better) chosen = static_cast<int>(i);
    }
    if (chosen < 0) {
      result.reached_target = false;
      break;
    }

    LeafState leaf = std::move(leaves[chosen]);
    leaves.erase(leaves.begin() + chosen);

    LeafState left_child, right_child;
    left_child.depth = right_child.depth = leaf.depth + 1;
    for (int p : leaf.points) {
      double v = points(p, leaf.cut.input_dim);
      bool inside = leaf.cut.lower <= v && v <= leaf.cut.upper;
      (inside ? left_child.points : right_child.points).push_back(p);
    }

    TreeNode& node = result.tree.nodes[leaf.node_idx];
    node.is_leaf = false;
    node.cut = leaf.cut;
    node.leaf_id = -1;
    node.cluster_id = -1;
    node.trace.reset();

    TreeNode lnode, rnode;
    lnode.is_leaf = rnode.is_leaf = true;
    lnode.cluster_id = leaf.score.left_center;
    rnode.cluster_id = leaf.score.right_center;
    left_child.node_idx = static_cast<int>(result.tree.nodes.size());
    result.tree.nodes.push_back(lnode);
    right_child.node_idx = static_cast<int>(result.tree.nodes.size());
    result.tree.nodes.push_back(rnode);
    result.tree.nodes[leaf.node_idx].left = left_child.node_idx;
    result.tree.nodes[leaf.node_idx].right = right_child.node_idx;
    result.tree.k_leaves += 1;

    find_best_split(left_child, points, table, options.cut_mode, options.max_unique_values);
    find_best_split(right_child, points, table, options.cut_mode, options.max_unique_values);
    leaves.push_back(std::move(left_child));
    leaves.push_back(std::move(right_child));
  }

  // renumber leaf ids densely in node order
  int next_leaf = 0;
  for (auto& node : result.tree.nodes) {
    if (node.is_leaf) node.leaf_id = next_leaf++;
  }
  validate_tree(result.tree);
  return result;
}

}  // namespace ikclust
