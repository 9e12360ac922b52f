#include "ikclust/kernel_imm.hpp"

#include <algorithm>
#include <stdexcept>

namespace ikclust {
namespace {

int translate_node(const FeatureTree& feature_tree, int fidx, const FeatureMatrix& features,
                   const Matrix& points,
                   const std::vector<std::vector<double>>& coord_values,
                   InterpretableTree& out, int& next_leaf) {
  const FeatureTreeNode& fnode = feature_tree.nodes[fidx];
  int idx = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();

  if (fnode.is_leaf) {
    out.nodes[idx].is_leaf = true;
    out.nodes[idx].leaf_id = next_leaf++;
    out.nodes[idx].cluster_id = fnode.center_id;
    ++out.k_leaves;
    return idx;
  }

  const FeatureDescriptor& desc = features.descriptors[fnode.cut.column];
  IntervalCut cut = translate_and_snap(desc, fnode.cut.theta, CutDirection::le,
                                       coord_values[desc.input_dim]);

  // the translated split must reproduce the feature split on this node's data
  for (int p : fnode.points) {
    bool feature_left = features.values(p, fnode.cut.column) <= fnode.cut.theta;
    bool inside = cut.lower <= points(p, desc.input_dim) && points(p, desc.input_dim) <= cut.upper;
    bool interval_left = inside == cut.inside_goes_left;
    if (feature_left != interval_left) {
      throw std::logic_error("kernel_imm: translated cut disagrees with the feature split");
    }
  }

  FeatureCutTrace trace{fnode.cut.column, fnode.cut.theta, cut.inside_goes_left};
  int first = fnode.left;
  int second = fnode.right;
  if (!cut.inside_goes_left) {
    // normalize: interval side goes left, so the phi > theta subtree comes first
    std::swap(first, second);
    cut.inside_goes_left = true;
  }
  int left = translate_node(feature_tree, first, features, points, coord_values, out, next_leaf);
  int right = translate_node(feature_tree, second, features, points, coord_values, out, next_leaf);
  out.nodes[idx].is_leaf = false;
  out.nodes[idx].cut = cut;
  out.nodes[idx].trace = trace;
  out.nodes[idx].left = left;
  out.nodes[idx].right = right;
  return idx;
}

FeatureMatrix build_features(const Matrix& points, const KernelSpec& spec, FeatureMode mode,
                             int order) {
  switch (mode) {
    case FeatureMode::taylor:
      return taylor_features(points, spec, order);
    case FeatureMode::distance:
      return distance_features(points, spec);
    case FeatureMode::additive:
      return additive_features(points, spec, order);
    case FeatureMode::raw:
      return identity_features(points);
    case FeatureMode::auto_best:
      break;
  }
  throw std::invalid_argument("kernel_imm: unresolved feature mode");
}

std::vector<FeatureMode> resolve_modes(const KernelSpec& spec, FeatureMode mode) {
  if (mode != FeatureMode::auto_best) {
    bool ok = false;
    switch (mode) {
      case FeatureMode::taylor: ok = spec.family == KernelFamily::gaussian; break;
      case FeatureMode::distance: ok = spec.product_family(); break;
      case FeatureMode::additive: ok = spec.additive_family(); break;
      case FeatureMode::raw: ok = true; break;
      default: break;
    }
    if (!ok) {
      throw std::invalid_argument("kernel_imm: feature mode " + feature_mode_name(mode) +
                                  " is incompatible with kernel " + family_name(spec.family));
    }
    return {mode};
  }
  if (spec.family == KernelFamily::gaussian) {
    return {FeatureMode::taylor, FeatureMode::distance};
  }
  if (spec.family == KernelFamily::laplace) return {FeatureMode::distance};
  if (spec.additive_family()) return {FeatureMode::additive};
  return {FeatureMode::raw};
}

}  // namespace

std::string feature_mode_name(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::taylor: return "taylor";
    case FeatureMode::distance: return "distance";
    case FeatureMode::additive: return "additive";
    case FeatureMode::raw: return "raw";
    case FeatureMode::auto_best: return "auto";
  }
  throw std::logic_error("unknown feature mode");
}

FeatureMode feature_mode_from_name(const std::string& name) {
  if (name == "taylor") return FeatureMode::taylor;
  if (name == "distance") return FeatureMode::distance;
  if (name == "additive") return FeatureMode::additive;
  if (name == "raw") return FeatureMode::raw;
  if (name == "auto" || name == "auto_best") return FeatureMode::auto_best;
  throw std::invalid_argument("unknown feature mode: " + name);
}

InterpretableTree translate_feature_tree(const FeatureTree& feature_tree,
                                         const FeatureMatrix& features, const Matrix& points) {
  if (feature_tree.nodes.empty()) throw std::invalid_argument("translate: empty feature tree");
  std::vector<std::vector<double>> coord_values(points.cols());
  for (int c = 0; c < points.cols(); ++c) {
    coord_values[c].assign(points.col(c).data(), points.col(c).data() + points.rows());
  }
  InterpretableTree tree;
  int next_leaf = 0;
  translate_node(feature_tree, 0, features, points, coord_values, tree, next_leaf);
  validate_tree(tree);
  return tree;
}

KernelImmResult kernel_imm_from_reference(const Dataset& data, const KernelSpec& spec,
                                          const GramMatrix& gram,
                                          const ClusteringResult& reference, FeatureMode mode,
                                          int order) {
  data.validate();
  const int k = reference.k;
  if (k < 1) throw std::invalid_argument("kernel_imm: k must be at least 1");
  std::vector<int> sizes(k, 0);
  for (int l : reference.labels) {
    if (l < 0 || l >= k) throw std::invalid_argument("kernel_imm: reference label out of range");
    ++sizes[l];
  }
  for (int l = 0; l < k; ++l) {
    if (sizes[l] == 0) {
      throw std::invalid_argument("kernel_imm: degenerate reference clustering (cluster " +
                                  std::to_string(l) + " is empty)");
    }
  }

  KernelImmResult best;
  bool have_best = false;
  for (FeatureMode candidate : resolve_modes(spec, mode)) {
    KernelImmResult result;
    result.reference = reference;
    result.gram = gram;
    result.mode_used = candidate;
    result.features = build_features(data.points, spec, candidate, order);
    Matrix centers = surrogate_centers(result.features, reference.labels);
    result.feature_tree = imm_build(result.features.values, reference.labels, centers);
    result.tree = translate_feature_tree(result.feature_tree, result.features, data.points);
    result.tree_cost_value = tree_cost(result.tree, gram, data.points);
    if (!have_best || result.tree_cost_value < best.tree_cost_value) {
      best = std::move(result);
      have_best = true;
    }
  }
  return best;
}

KernelImmResult kernel_imm(const Dataset& data, const KernelSpec& spec, int k, FeatureMode mode,
                           int order, const InitConfig& init) {
  data.validate();
  GramMatrix gram = gram_matrix(spec, data.points);
  ClusteringResult reference = kernel_kmeans(gram, k, init);
  return kernel_imm_from_reference(data, spec, gram, reference, mode, order);
}

void verify_center_separation(const InterpretableTree& tree, const Matrix& centers) {
  std::vector<int> leaf_of_center(centers.rows(), -1);
  for (int c = 0; c < centers.rows(); ++c) {
    int idx = 0;
    while (!tree.nodes[idx].is_leaf) {
      const TreeNode& node = tree.nodes[idx];
      if (!node.trace) {
        throw std::logic_error("center separation: node lacks a feature-space trace");
      }
      bool le = centers(c, node.trace->column) <= node.trace->theta;
      idx = (le == node.trace->le_goes_left) ? node.left : node.right;
    }
    for (int other = 0; other < centers.rows(); ++other) {
      if (leaf_of_center[other] == idx) {
        throw std::logic_error("center separation: two centers share a leaf");
      }
    }
    leaf_of_center[c] = idx;
    if (tree.nodes[idx].cluster_id != c) {
      throw std::logic_error("center separation: leaf cluster id differs from its center");
    }
  }
}

}  // namespace ikclust
