#include "ikclust/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ikclust/kernel_kmeans.hpp"

namespace ikclust {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool route_inside(const IntervalCut& cut, double v) {
  return cut.lower <= v && v <= cut.upper;
}

bool goes_left(const TreeNode& node, const Eigen::Ref<const Vector>& point) {
  double v = point[node.cut.input_dim];
  return route_inside(node.cut, v) == node.cut.inside_goes_left;
}

json node_to_json(const InterpretableTree& tree, int idx) {
  const TreeNode& node = tree.nodes[idx];
  if (node.is_leaf) {
    return json{{"leaf", node.leaf_id}, {"cluster", node.cluster_id}};
  }
  // serialized cuts always send the interval side left
  int left = node.left;
  int right = node.right;
  if (!node.cut.inside_goes_left) std::swap(left, right);
  json j;
  j["dim"] = node.cut.input_dim;
  j["lower"] = std::isfinite(node.cut.lower) ? json(node.cut.lower) : json(nullptr);
  j["upper"] = std::isfinite(node.cut.upper) ? json(node.cut.upper) : json(nullptr);
  j["left"] = node_to_json(tree, left);
  j["right"] = node_to_json(tree, right);
  return j;
}

int node_from_json(const json& j, InterpretableTree& tree) {
  int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    tree.nodes[idx].is_leaf = true;
    tree.nodes[idx].leaf_id = j.at("leaf").get<int>();
    tree.nodes[idx].cluster_id = j.at("cluster").get<int>();
    ++tree.k_leaves;
    return idx;
  }
  TreeNode node;
  node.is_leaf = false;
  node.cut.input_dim = j.at("dim").get<int>();
  node.cut.lower = j.at("lower").is_null() ? -kInf : j.at("lower").get<double>();
  node.cut.upper = j.at("upper").is_null() ? kInf : j.at("upper").get<double>();
  node.cut.inside_goes_left = true;
  tree.nodes[idx] = node;
  int left = node_from_json(j.at("left"), tree);
  int right = node_from_json(j.at("right"), tree);
  tree.nodes[idx].left = left;
  tree.nodes[idx].right = right;
  return idx;
}

std::string cut_label(const IntervalCut& cut, bool inside) {
  std::ostringstream out;
  out.precision(6);
  std::string var = "x" + std::to_string(cut.input_dim);
  bool lo = std::isfinite(cut.lower);
  bool hi = std::isfinite(cut.upper);
  if (lo && hi) {
    out << var << (inside ? " in [" : " not in [") << cut.lower << ", " << cut.upper << "]";
  } else if (hi) {
    out << var << (inside ? " <= " : " > ") << cut.upper;
  } else {
    out << var << (inside ? " >= " : " < ") << cut.lower;
  }
  return out.str();
}

void dot_node(const InterpretableTree& tree, int idx, std::ostringstream& out) {
  const TreeNode& node = tree.nodes[idx];
  if (node.is_leaf) {
    out << "  n" << idx << " [shape=box, label=\"cluster " << node.cluster_id << "\"];\n";
    return;
  }
  out << "  n" << idx << " [label=\"x" << node.cut.input_dim << "\"];\n";
  int inside_child = node.cut.inside_goes_left ? node.left : node.right;
  int outside_child = node.cut.inside_goes_left ? node.right : node.left;
  out << "  n" << idx << " -> n" << inside_child << " [label=\""
      << cut_label(node.cut, true) << "\"];\n";
  out << "  n" << idx << " -> n" << outside_child << " [label=\""
      << cut_label(node.cut, false) << "\"];\n";
  dot_node(tree, node.left, out);
  dot_node(tree, node.right, out);
}

void text_node(const InterpretableTree& tree, int idx, int depth, std::ostringstream& out) {
  const TreeNode& node = tree.nodes[idx];
  for (int i = 0; i < depth; ++i) out << "  ";
  if (node.is_leaf) {
    out << "leaf " << node.leaf_id << " -> cluster " << node.cluster_id << "\n";
    return;
  }
  int inside_child = node.cut.inside_goes_left ? node.left : node.right;
  int outside_child = node.cut.inside_goes_left ? node.right : node.left;
  out << cut_label(node.cut, true) << "\n";
  text_node(tree, inside_child, depth + 1, out);
  for (int i = 0; i < depth; ++i) out << "  ";
  out << "else\n";
  text_node(tree, outside_child, depth + 1, out);
}

bool nodes_equal(const InterpretableTree& a, int ia, const InterpretableTree& b, int ib) {
  const TreeNode& na = a.nodes[ia];
  const TreeNode& nb = b.nodes[ib];
  if (na.is_leaf != nb.is_leaf) return false;
  if (na.is_leaf) return na.leaf_id == nb.leaf_id && na.cluster_id == nb.cluster_id;
  if (na.cut.input_dim != nb.cut.input_dim) return false;
  if (na.cut.lower != nb.cut.lower || na.cut.upper != nb.cut.upper) return false;
  // compare with the interval side sent left on both
  int aleft = na.cut.inside_goes_left ? na.left : na.right;
  int aright = na.cut.inside_goes_left ? na.right : na.left;
  int bleft = nb.cut.inside_goes_left ? nb.left : nb.right;
  int bright = nb.cut.inside_goes_left ? nb.right : nb.left;
  return nodes_equal(a, aleft, b, bleft) && nodes_equal(a, aright, b, bright);
}

double partition_cost(const std::vector<int>& raw_labels, const GramMatrix& gram) {
  // remap to dense ids, dropping absent ones
  std::map<int, int> remap;
  for (int l : raw_labels) remap.emplace(l, 0);
  int next = 0;
  for (auto& [id, dense] : remap) dense = next++;
  std::vector<int> labels(raw_labels.size());
  for (std::size_t i = 0; i < raw_labels.size(); ++i) labels[i] = remap.at(raw_labels[i]);
  return clustering_cost(gram, labels);
}

}  // namespace

InterpretableTree single_leaf_tree(int cluster_id) {
  InterpretableTree tree;
  TreeNode leaf;
  leaf.is_leaf = true;
  leaf.leaf_id = 0;
  leaf.cluster_id = cluster_id;
  tree.nodes.push_back(leaf);
  tree.k_leaves = 1;
  return tree;
}

int predict(const InterpretableTree& tree, const Eigen::Ref<const Vector>& point) {
  if (tree.nodes.empty()) throw std::invalid_argument("predict: empty tree");
  int idx = 0;
  while (!tree.nodes[idx].is_leaf) {
    const TreeNode& node = tree.nodes[idx];
    if (node.cut.input_dim >= point.size()) {
      throw std::invalid_argument("predict: point dimension too small for tree cuts");
    }
    idx = goes_left(node, point) ? node.left : node.right;
  }
  return tree.nodes[idx].cluster_id;
}

std::vector<int> route_to_leaves(const InterpretableTree& tree, const Matrix& points) {
  std::vector<int> leaf(points.rows());
  for (int r = 0; r < points.rows(); ++r) {
    int idx = 0;
    while (!tree.nodes[idx].is_leaf) {
      const TreeNode& node = tree.nodes[idx];
      idx = goes_left(node, points.row(r).transpose()) ? node.left : node.right;
    }
    leaf[r] = idx;
  }
  return leaf;
}

std::vector<int> induced_partition(const InterpretableTree& tree, const Matrix& points) {
  std::vector<int> labels(points.rows());
  auto leaves = route_to_leaves(tree, points);
  for (int r = 0; r < points.rows(); ++r) labels[r] = tree.nodes[leaves[r]].cluster_id;
  return labels;
}

std::vector<int> empty_leaves(const InterpretableTree& tree, const Matrix& points) {
  auto leaves = route_to_leaves(tree, points);
  std::vector<bool> hit(tree.nodes.size(), false);
  for (int leaf : leaves) hit[leaf] = true;
  std::vector<int> empty;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].is_leaf && !hit[i]) empty.push_back(static_cast<int>(i));
  }
  return empty;
}

double tree_cost(const InterpretableTree& tree, const GramMatrix& gram, const Matrix& points) {
  if (points.rows() == 0) throw std::invalid_argument("tree_cost: no points");
  if (points.rows() != gram.point_count()) {
    throw std::invalid_argument("tree_cost: gram and points disagree on n");
  }
  return partition_cost(induced_partition(tree, points), gram);
}

double tree_cost_per_leaf(const InterpretableTree& tree, const GramMatrix& gram,
                          const Matrix& points) {
  if (points.rows() == 0) throw std::invalid_argument("tree_cost_per_leaf: no points");
  return partition_cost(route_to_leaves(tree, points), gram);
}

std::string export_tree(const InterpretableTree& tree, TreeFormat format) {
  validate_tree(tree);
  switch (format) {
    case TreeFormat::json: {
      json j;
      j["node"] = node_to_json(tree, 0);
      return j.dump(2);
    }
    case TreeFormat::dot: {
      std::ostringstream out;
      out << "digraph tree {\n";
      dot_node(tree, 0, out);
      out << "}\n";
      return out.str();
    }
    case TreeFormat::text: {
      std::ostringstream out;
      text_node(tree, 0, 0, out);
      return out.str();
    }
  }
  throw std::invalid_argument("export_tree: unknown format");
}

InterpretableTree import_tree(const std::string& json_text) {
  json j = json::parse(json_text);
  if (!j.contains("node")) throw std::invalid_argument("import_tree: missing root node");
  InterpretableTree tree;
  node_from_json(j.at("node"), tree);
  validate_tree(tree);
  return tree;
}

bool structurally_equal(const InterpretableTree& a, const InterpretableTree& b) {
  if (a.nodes.empty() || b.nodes.empty()) return a.nodes.empty() == b.nodes.empty();
  return nodes_equal(a, 0, b, 0);
}

void validate_tree(const InterpretableTree& tree) {
  if (tree.nodes.empty()) throw std::invalid_argument("tree: no nodes");
  std::vector<int> seen(tree.nodes.size(), 0);
  int leaves = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int idx = stack.back();
    stack.pop_back();
    if (idx < 0 || idx >= static_cast<int>(tree.nodes.size())) {
      throw std::invalid_argument("tree: child index out of range");
    }
    if (seen[idx]++) throw std::invalid_argument("tree: node reachable twice");
    const TreeNode& node = tree.nodes[idx];
    if (node.is_leaf) {
      ++leaves;
      continue;
    }
    const IntervalCut& cut = node.cut;
    if (!(cut.lower < cut.upper)) throw std::invalid_argument("tree: cut lower >= upper");
    if (!std::isfinite(cut.lower) && !std::isfinite(cut.upper)) {
      throw std::invalid_argument("tree: cut with both bounds infinite");
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  if (leaves != tree.k_leaves) {
    throw std::invalid_argument("tree: k_leaves does not match the actual leaf count");
  }
}

}  // namespace ikclust
