#pragma once

#include "ikclust/datasets.hpp"
#include "ikclust/imm.hpp"
#include "ikclust/kernel_kmeans.hpp"
#include "ikclust/surrogate_features.hpp"
#include "ikclust/tree.hpp"

namespace ikclust {

// Surrogate feature construction used for the tree. auto_best picks the
// natural construction for the kernel; for the gaussian kernel it builds both
// the Taylor and the anchor features and keeps the tree with the lower cost.
// raw runs mistake minimization directly on the input coordinates (the exact
// feature space of the linear kernel).
enum class FeatureMode { taylor, distance, additive, raw, auto_best };

std::string feature_mode_name(FeatureMode mode);
FeatureMode feature_mode_from_name(const std::string& name);

struct KernelImmResult {
  InterpretableTree tree;
  ClusteringResult reference;
  GramMatrix gram;
  FeatureTree feature_tree;
  FeatureMatrix features;
  FeatureMode mode_used = FeatureMode::raw;
  double tree_cost_value = 0.0;
};

// Translates a feature-space tree into an interval-cut tree on the input
// coordinates. Every node's data split is verified to match the feature-side
// split exactly; cuts are normalized so the interval side goes left.
InterpretableTree translate_feature_tree(const FeatureTree& feature_tree,
                                         const FeatureMatrix& features, const Matrix& points);

// Reference kernel k-means, surrogate features of the fixed labeling, mistake
// minimization in the feature space, and translation back to an interval-cut
// tree with exactly k leaves.
KernelImmResult kernel_imm(const Dataset& data, const KernelSpec& spec, int k,
                           FeatureMode mode = FeatureMode::auto_best, int order = 5,
                           const InitConfig& init = {});

// Same, reusing an existing Gram matrix and reference clustering.
KernelImmResult kernel_imm_from_reference(const Dataset& data, const KernelSpec& spec,
                                          const GramMatrix& gram,
                                          const ClusteringResult& reference,
                                          FeatureMode mode = FeatureMode::auto_best,
                                          int order = 5);

// Routes each surrogate center through the translated tree via the recorded
// feature-space cuts and checks the leaf/center bijection. Throws on failure.
void verify_center_separation(const InterpretableTree& tree, const Matrix& centers);

}  // namespace ikclust
