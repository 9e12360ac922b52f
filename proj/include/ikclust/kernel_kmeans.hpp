#pragma once

#include <cstdint>
#include <vector>

#include "ikclust/kernels.hpp"

namespace ikclust {

enum class InitMethod { kpp_feature_space, random_assignment };

struct InitConfig {
  InitMethod method = InitMethod::kpp_feature_space;
  std::uint64_t seed = 0;
  int restarts = 1;
  int max_iterations = 300;
};

struct ClusteringResult {
  std::vector<int> labels;
  int k = 0;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  // cost after each committed assignment sweep of the winning restart
  std::vector<double> cost_trace;
};

// ||psi(x) - c_l||^2 via the kernel trick:
//   K(x,x) + (1/|C_l|^2) sum_{y,z in C_l} K(y,z) - (2/|C_l|) sum_{y in C_l} K(x,y)
// Small negative values from rounding (or from non-psd kernels) are clamped
// to zero. Throws if the cluster is empty.
double point_to_cluster_sqdist(const GramMatrix& gram, const std::vector<int>& labels,
                               int point, int cluster);

// Sum of point_to_cluster_sqdist over all points against their own cluster.
double clustering_cost(const GramMatrix& gram, const std::vector<int>& labels);

// Lloyd iterations in the feature space, best cost over init.restarts runs.
// Deterministic given init.seed. Assignments are computed against a snapshot
// of the current clusters and committed together; ties in the argmin go to
// the lowest cluster id. A cluster that empties is refilled with the point
// farthest from its own center.
ClusteringResult kernel_kmeans(const GramMatrix& gram, int k, const InitConfig& init = {});

}  // namespace ikclust
