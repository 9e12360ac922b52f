#include "ikclust/imm.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace ikclust {
namespace {

struct BestCut {
  int column = -1;
  double theta = 0.0;
  int mistakes = std::numeric_limits<int>::max();
};

BestCut pick_min_mistake_cut(const Matrix& features, const std::vector<int>& labels,
                             const Matrix& centers, const std::vector<int>& node_points,
                             const std::vector<int>& node_centers) {
  BestCut best;
  for (const auto& [column, theta] : candidate_cuts(centers, node_centers)) {
    int mistakes = count_mistakes(features, labels, centers, node_points, node_centers,
                                  column, theta);
    if (mistakes < best.mistakes ||
        (mistakes == best.mistakes &&
         (column < best.column || (column == best.column && theta < best.theta)))) {
      best = {column, theta, mistakes};
    }
  }
  return best;
}

int build_node(const Matrix& features, const std::vector<int>& labels, const Matrix& centers,
               FeatureTree& tree, std::vector<int> points, std::vector<int> node_centers) {
  int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[idx].points = std::move(points);
  tree.nodes[idx].centers = std::move(node_centers);
  const auto& node_points = tree.nodes[idx].points;
  const auto& remaining = tree.nodes[idx].centers;

  if (remaining.size() == 1) {
    tree.nodes[idx].is_leaf = true;
    tree.nodes[idx].center_id = remaining[0];
    return idx;
  }

  BestCut best = pick_min_mistake_cut(features, labels, centers, node_points, remaining);
  tree.nodes[idx].cut = {best.column, best.theta, best.mistakes};

  std::vector<int> left_points, right_points;
  for (int p : node_points) {
    (features(p, best.column) <= best.theta ? left_points : right_points).push_back(p);
  }
  std::vector<int> left_centers, right_centers;
  for (int c : remaining) {
    (centers(c, best.column) <= best.theta ? left_centers : right_centers).push_back(c);
  }
  int left = build_node(features, labels, centers, tree, std::move(left_points),
                        std::move(left_centers));
  int right = build_node(features, labels, centers, tree, std::move(right_points),
                         std::move(right_centers));
  tree.nodes[idx].left = left;
  tree.nodes[idx].right = right;
  return idx;
}

void check_mistake_lower_bound(const Matrix& features, const std::vector<int>& labels,
                               const Matrix& centers, const FeatureTreeNode& node, int k) {
  // t(u) * max_{a,b in M^u} (a_i - b_i)^2 <= 4k * sum_{x in X^u_cor} (x_i - c_i(x))^2
  const double t = node.cut.mistakes;
  if (t == 0.0) return;
  for (int col = 0; col < features.cols(); ++col) {
    double spread = 0.0;
    for (std::size_t a = 0; a < node.centers.size(); ++a) {
      for (std::size_t b = a + 1; b < node.centers.size(); ++b) {
        double diff = centers(node.centers[a], col) - centers(node.centers[b], col);
        spread = std::max(spread, diff * diff);
      }
    }
    double correct_sq = 0.0;
    for (int p : node.points) {
      if (std::find(node.centers.begin(), node.centers.end(), labels[p]) ==
          node.centers.end()) {
        continue;
      }
      double diff = features(p, col) - centers(labels[p], col);
      correct_sq += diff * diff;
    }
    if (t * spread > 4.0 * k * correct_sq + 1e-9 * std::max(1.0, t * spread)) {
      throw std::logic_error("imm: per-column mistake lower bound violated at column " +
                             std::to_string(col));
    }
  }
}

}  // namespace

int count_mistakes(const Matrix& features, const std::vector<int>& labels,
                   const Matrix& centers, const std::vector<int>& node_points,
                   const std::vector<int>& node_centers, int column, double theta) {
  std::vector<char> present(centers.rows(), 0);
  for (int c : node_centers) present[c] = 1;
  int mistakes = 0;
  for (int p : node_points) {
    int center = labels[p];
    if (!present[center]) continue;  // already separated higher up
    bool point_left = features(p, column) <= theta;
    bool center_left = centers(center, column) <= theta;
    if (point_left != center_left) ++mistakes;
  }
  return mistakes;
}

std::vector<std::pair<int, double>> candidate_cuts(const Matrix& centers,
                                                   const std::vector<int>& node_centers) {
  if (node_centers.size() < 2) {
    throw std::invalid_argument("candidate_cuts: need at least two centers");
  }
  std::vector<std::pair<int, double>> cuts;
  for (int col = 0; col < centers.cols(); ++col) {
    std::vector<double> values;
    values.reserve(node_centers.size());
    for (int c : node_centers) values.push_back(centers(c, col));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      cuts.emplace_back(col, 0.5 * (values[i] + values[i + 1]));
    }
  }
  if (cuts.empty()) {
    throw std::invalid_argument("candidate_cuts: centers are identical in every column");
  }
  return cuts;
}

FeatureTree imm_build(const Matrix& features, const std::vector<int>& labels,
                      const Matrix& centers) {
  const int n = static_cast<int>(features.rows());
  const int k = static_cast<int>(centers.rows());
  if (k < 1) throw std::invalid_argument("imm_build: need at least one center");
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("imm_build: label count mismatch");
  }
  for (int l : labels) {
    if (l < 0 || l >= k) throw std::invalid_argument("imm_build: label outside center range");
  }
  if (features.cols() != centers.cols()) {
    throw std::invalid_argument("imm_build: feature/center width mismatch");
  }

  FeatureTree tree;
  tree.k = k;
  std::vector<int> all_points(n);
  for (int i = 0; i < n; ++i) all_points[i] = i;
  std::vector<int> all_centers(k);
  for (int c = 0; c < k; ++c) all_centers[c] = c;
  build_node(features, labels, centers, tree, std::move(all_points), std::move(all_centers));

  for (const auto& node : tree.nodes) {
    if (!node.is_leaf) check_mistake_lower_bound(features, labels, centers, node, k);
  }
  return tree;
}

void verify_imm_tree(const Matrix& features, const std::vector<int>& labels,
                     const Matrix& centers, const FeatureTree& tree) {
  const int k = static_cast<int>(centers.rows());
  std::vector<int> leaf_of_center(k, -1);
  int leaves = 0;
  for (std::size_t idx = 0; idx < tree.nodes.size(); ++idx) {
    const auto& node = tree.nodes[idx];
    if (node.is_leaf) {
      ++leaves;
      if (node.centers.size() != 1 || node.centers[0] != node.center_id) {
        throw std::logic_error("imm: leaf does not hold exactly one center");
      }
      if (leaf_of_center[node.center_id] != -1) {
        throw std::logic_error("imm: center reaches two leaves");
      }
      leaf_of_center[node.center_id] = static_cast<int>(idx);
      continue;
    }
    int rescan = std::numeric_limits<int>::max();
    for (const auto& [column, theta] : candidate_cuts(centers, node.centers)) {
      rescan = std::min(rescan, count_mistakes(features, labels, centers, node.points,
                                               node.centers, column, theta));
    }
    if (node.cut.mistakes != count_mistakes(features, labels, centers, node.points,
                                            node.centers, node.cut.column, node.cut.theta) ||
        node.cut.mistakes > rescan) {
      throw std::logic_error("imm: chosen cut is not mistake minimal");
    }
    check_mistake_lower_bound(features, labels, centers, node, k);
  }
  if (leaves != k) throw std::logic_error("imm: leaf count differs from center count");
  for (int c = 0; c < k; ++c) {
    if (leaf_of_center[c] < 0) throw std::logic_error("imm: center missing from all leaves");
  }
}

}  // namespace ikclust
