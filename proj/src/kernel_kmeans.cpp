#include "ikclust/kernel_kmeans.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ikclust/rng.hpp"

namespace ikclust {
namespace {

struct SweepStats {
  Matrix cross;               // n x k, cross(x, l) = sum_{y in C_l} K(x, y)
  std::vector<double> within; // within[l] = sum_{y,z in C_l} K(y, z)
  std::vector<int> sizes;
  double cost = 0.0;
};

SweepStats compute_stats(const GramMatrix& gram, const std::vector<int>& labels, int k) {
  const int n = gram.point_count();
  Matrix indicator = Matrix::Zero(n, k);
  SweepStats stats;
  stats.sizes.assign(k, 0);
  for (int i = 0; i < n; ++i) {
    indicator(i, labels[i]) = 1.0;
    ++stats.sizes[labels[i]];
  }
  stats.cross = gram.values * indicator;
  stats.within.assign(k, 0.0);
  for (int l = 0; l < k; ++l) {
    stats.within[l] = stats.cross.col(l).dot(indicator.col(l));
  }
  stats.cost = 0.0;
  for (int i = 0; i < n; ++i) {
    int l = labels[i];
    double m = stats.sizes[l];
    double d = gram.values(i, i) + stats.within[l] / (m * m) - 2.0 * stats.cross(i, l) / m;
    stats.cost += std::max(0.0, d);
  }
  return stats;
}

// assignment sweep against a snapshot; ties go to the lowest cluster id
std::vector<int> assign_labels(const GramMatrix& gram, const SweepStats& stats, int k) {
  const int n = gram.point_count();
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_aff = std::numeric_limits<double>::infinity();
    for (int l = 0; l < k; ++l) {
      double m = stats.sizes[l];
      double aff = stats.within[l] / (m * m) - 2.0 * stats.cross(i, l) / m;
      if (aff < best_aff) {
        best_aff = aff;
        best = l;
      }
    }
    labels[i] = best;
  }
  return labels;
}

// refill empty clusters with the point farthest from its own center
// (ties to the smallest point index); returns true if anything moved
bool repair_empty_clusters(const GramMatrix& gram, std::vector<int>& labels, int k) {
  bool repaired = false;
  while (true) {
    std::vector<int> sizes(k, 0);
    for (int l : labels) ++sizes[l];
    int empty = -1;
    for (int l = 0; l < k; ++l) {
      if (sizes[l] == 0) {
        empty = l;
        break;
      }
    }
    if (empty < 0) return repaired;
    SweepStats stats = compute_stats(gram, labels, k);
    int farthest = -1;
    double farthest_d = -1.0;
    for (int i = 0; i < gram.point_count(); ++i) {
      int l = labels[i];
      if (stats.sizes[l] < 2) continue;
      double m = stats.sizes[l];
      double d = gram.values(i, i) + stats.within[l] / (m * m) - 2.0 * stats.cross(i, l) / m;
      if (d > farthest_d) {
        farthest_d = d;
        farthest = i;
      }
    }
    if (farthest < 0) throw std::logic_error("kernel_kmeans: cannot repair empty cluster");
    labels[farthest] = empty;
    repaired = true;
  }
}

std::vector<int> init_labels(const GramMatrix& gram, int k, const InitConfig& init, Rng& rng) {
  const int n = gram.point_count();
  std::vector<int> labels(n, 0);
  if (init.method == InitMethod::random_assignment) {
    for (int i = 0; i < n; ++i) labels[i] = rng.uniform_int(k);
    repair_empty_clusters(gram, labels, k);
    return labels;
  }

  // k-means++ style seeding in the feature space: pointwise kernel distances
  // d^2(x, s) = K(x,x) + K(s,s) - 2 K(x,s)
  std::vector<int> seeds;
  std::vector<bool> chosen(n, false);
  int first = rng.uniform_int(n);
  seeds.push_back(first);
  chosen[first] = true;
  std::vector<double> nearest(n);
  auto sqdist = [&](int x, int s) {
    return std::max(0.0, gram.values(x, x) + gram.values(s, s) - 2.0 * gram.values(x, s));
  };
  for (int i = 0; i < n; ++i) nearest[i] = sqdist(i, first);
  while (static_cast<int>(seeds.size()) < k) {
    int next = rng.discrete(nearest);
    if (chosen[next]) {
      next = -1;
      for (int i = 0; i < n; ++i) {
        if (!chosen[i]) {
          next = i;
          break;
        }
      }
      if (next < 0) throw std::logic_error("kernel_kmeans: fewer distinct points than clusters");
    }
    seeds.push_back(next);
    chosen[next] = true;
    for (int i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], sqdist(i, next));
  }
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = sqdist(i, seeds[0]);
    for (int s = 1; s < k; ++s) {
      double d = sqdist(i, seeds[s]);
      if (d < best_d) {
        best_d = d;
        best = s;
      }
    }
    labels[i] = best;
  }
  repair_empty_clusters(gram, labels, k);
  return labels;
}

ClusteringResult run_once(const GramMatrix& gram, int k, const InitConfig& init, Rng& rng) {
  ClusteringResult result;
  result.k = k;
  result.labels = init_labels(gram, k, init, rng);

  SweepStats stats = compute_stats(gram, result.labels, k);
  result.cost_trace.push_back(stats.cost);
  for (int iter = 0; iter < init.max_iterations; ++iter) {
    std::vector<int> next = assign_labels(gram, stats, k);
    result.iterations = iter + 1;
    if (next == result.labels) {
      result.converged = true;
      break;
    }
    result.labels = std::move(next);
    repair_empty_clusters(gram, result.labels, k);
    stats = compute_stats(gram, result.labels, k);
    result.cost_trace.push_back(stats.cost);
  }
  result.cost = stats.cost;
  return result;
}

}  // namespace

double point_to_cluster_sqdist(const GramMatrix& gram, const std::vector<int>& labels,
                               int point, int cluster) {
  const int n = gram.point_count();
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("point_to_cluster_sqdist: label count mismatch");
  }
  if (point < 0 || point >= n) throw std::invalid_argument("point_to_cluster_sqdist: point out of range");
  double within = 0.0;
  double cross = 0.0;
  int size = 0;
  for (int y = 0; y < n; ++y) {
    if (labels[y] != cluster) continue;
    ++size;
    cross += gram.values(point, y);
    for (int z = 0; z < n; ++z) {
      if (labels[z] == cluster) within += gram.values(y, z);
    }
  }
  if (size == 0) throw std::invalid_argument("point_to_cluster_sqdist: empty cluster");
  double m = size;
  double d = gram.values(point, point) + within / (m * m) - 2.0 * cross / m;
  return std::max(0.0, d);
}

double clustering_cost(const GramMatrix& gram, const std::vector<int>& labels) {
  const int n = gram.point_count();
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("clustering_cost: label count mismatch");
  }
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("clustering_cost: negative label");
    k = std::max(k, l + 1);
  }
  std::vector<int> sizes(k, 0);
  for (int l : labels) ++sizes[l];
  for (int l = 0; l < k; ++l) {
    if (sizes[l] == 0) throw std::invalid_argument("clustering_cost: empty cluster " + std::to_string(l));
  }
  SweepStats stats = compute_stats(gram, labels, k);
  return stats.cost;
}

ClusteringResult kernel_kmeans(const GramMatrix& gram, int k, const InitConfig& init) {
  const int n = gram.point_count();
  if (k < 1) throw std::invalid_argument("kernel_kmeans: k must be at least 1");
  if (k > n) throw std::invalid_argument("kernel_kmeans: k exceeds the number of points");
  if (init.restarts < 1) throw std::invalid_argument("kernel_kmeans: restarts must be >= 1");
  if (init.max_iterations < 1) throw std::invalid_argument("kernel_kmeans: max_iterations must be >= 1");

  ClusteringResult best;
  bool have_best = false;
  for (int r = 0; r < init.restarts; ++r) {
    Rng rng(init.seed + static_cast<std::uint64_t>(r));
    ClusteringResult result = run_once(gram, k, init, rng);
    if (!have_best || result.cost < best.cost) {
      best = std::move(result);
      have_best = true;
    }
  }
  return best;
}

}  // namespace ikclust
