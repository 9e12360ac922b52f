#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "ikclust/datasets.hpp"
#include "ikclust/evaluation.hpp"
#include "ikclust/kernel_kmeans.hpp"

using namespace ikclust;

namespace {

// explicit feature maps used as oracles for the kernel-trick identity
Vector linear_psi(const Eigen::Ref<const Vector>& x) { return x; }

Vector quadratic_psi(const Eigen::Ref<const Vector>& x) {
  const int d = static_cast<int>(x.size());
  Vector out(d + d * (d - 1) / 2);
  int pos = 0;
  for (int i = 0; i < d; ++i) out[pos++] = x[i] * x[i];
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) out[pos++] = std::sqrt(2.0) * x[i] * x[j];
  }
  return out;
}

template <typename Psi>
double explicit_sqdist(const Matrix& points, const std::vector<int>& labels, int point,
                       int cluster, Psi psi) {
  Vector sample = psi(points.row(0).transpose());
  Vector mean = Vector::Zero(sample.size());
  int count = 0;
  for (int i = 0; i < points.rows(); ++i) {
    if (labels[i] == cluster) {
      mean += psi(points.row(i).transpose());
      ++count;
    }
  }
  mean /= count;
  return (psi(points.row(point).transpose()) - mean).squaredNorm();
}

}  // namespace

TEST_SUITE("kernel_kmeans") {

TEST_CASE("point to cluster distance") {
  Matrix points(3, 2);
  points << 0, 0, 5, 5, 6, 6;
  std::vector<int> labels{0, 1, 1};
  GramMatrix gram = gram_matrix(KernelSpec::gaussian_spec(1.0), points);
  CHECK(point_to_cluster_sqdist(gram, labels, 0, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(point_to_cluster_sqdist(gram, labels, 0, 2), std::invalid_argument);

  // linear kernel against the explicit mean
  Matrix random = testing::random_matrix(12, 2, 17, -1.0, 1.0);
  auto rlabels = testing::random_labels(12, 3, 18);
  GramMatrix lin = gram_matrix(KernelSpec::linear_spec(), random);
  for (int p = 0; p < 12; ++p) {
    for (int c = 0; c < 3; ++c) {
      CHECK(point_to_cluster_sqdist(lin, rlabels, p, c) ==
            doctest::Approx(explicit_sqdist(random, rlabels, p, c, linear_psi)).epsilon(1e-9));
    }
  }

  Dataset three = gen_exkmc_counterexample(0.1, 5);
  GramMatrix tgram = gram_matrix(KernelSpec::linear_spec(), three.points);
  // first point sits at -1 - eps; its cluster mean is exactly -1
  CHECK(point_to_cluster_sqdist(tgram, *three.labels, 0, 0) == doctest::Approx(0.01));
}

TEST_CASE("clustering cost") {
  Matrix same(4, 2);
  same << 1, 2, 1, 2, 1, 2, 1, 2;
  std::vector<int> one(4, 0);
  GramMatrix gram = gram_matrix(KernelSpec::gaussian_spec(0.5), same);
  CHECK(clustering_cost(gram, one) == doctest::Approx(0.0));

  Dataset three = gen_exkmc_counterexample(0.1, 10);
  GramMatrix lin = gram_matrix(KernelSpec::linear_spec(), three.points);
  CHECK(clustering_cost(lin, *three.labels) == doctest::Approx(0.6).epsilon(1e-12));

  Dataset quad = gen_quadratic_counterexample();
  GramMatrix qgram = gram_matrix(KernelSpec::quadratic_spec(), quad.points);
  CHECK(clustering_cost(qgram, *quad.labels) == doctest::Approx(0.0));

  CHECK_THROWS_AS(clustering_cost(gram, std::vector<int>{0, 0, 2, 2}), std::invalid_argument);
}

TEST_CASE("lloyd on trivial instances") {
  Matrix points = testing::random_matrix(6, 2, 23, 0.0, 1.0);
  GramMatrix gram = gram_matrix(KernelSpec::gaussian_spec(1.0), points);
  ClusteringResult all_own = kernel_kmeans(gram, 6, {InitMethod::kpp_feature_space, 1, 1, 50});
  CHECK(all_own.cost == doctest::Approx(0.0));
  std::vector<int> sorted = all_own.labels;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5});

  CHECK_THROWS_AS(kernel_kmeans(gram, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(kernel_kmeans(gram, 7, {}), std::invalid_argument);

  ClusteringResult single = kernel_kmeans(gram, 1, {});
  CHECK(single.converged);
  CHECK(single.cost == doctest::Approx(clustering_cost(gram, single.labels)));
}

TEST_CASE("halfmoons are separated at some grid bandwidth") {
  Dataset moons = gen_halfmoons(200, 0.05, 3);
  double best_ari = -1.0;
  for (double gamma : {2.0, 4.0, 8.0, 16.0}) {
    GramMatrix gram = gram_matrix(KernelSpec::gaussian_spec(gamma), moons.points);
    ClusteringResult result =
        kernel_kmeans(gram, 2, {InitMethod::kpp_feature_space, 1, 50, 300});
    best_ari = std::max(best_ari, adjusted_rand_index(*moons.labels, result.labels));
  }
  CHECK(best_ari == doctest::Approx(1.0));
}

TEST_CASE("matches the exhaustive oracle on small instances") {
  for (std::uint64_t seed : {100, 101, 102}) {
    Matrix points = testing::random_matrix(8, 2, seed, 0.0, 1.0);
    GramMatrix gram = gram_matrix(KernelSpec::gaussian_spec(2.0), points);
    ClusteringResult result = kernel_kmeans(gram, 2, {InitMethod::kpp_feature_space, 7, 50, 300});
    double oracle = brute_force_optimal_cost(gram, 2);
    CHECK(result.cost == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(result.cost >= oracle - 1e-12);
  }
}

TEST_CASE("cost trace descends and labels cover all clusters") {
  Matrix points = testing::random_matrix(40, 3, 55, -1.0, 1.0);
  GramMatrix gram = gram_matrix(KernelSpec::laplace_spec(1.5), points);
  for (auto method : {InitMethod::kpp_feature_space, InitMethod::random_assignment}) {
    ClusteringResult result = kernel_kmeans(gram, 4, {method, 3, 2, 300});
    for (std::size_t i = 1; i < result.cost_trace.size(); ++i) {
      CHECK(result.cost_trace[i] <= result.cost_trace[i - 1] + 1e-9);
    }
    std::vector<int> counts(4, 0);
    for (int l : result.labels) {
      REQUIRE(l >= 0);
      REQUIRE(l < 4);
      ++counts[l];
    }
    for (int c : counts) CHECK(c > 0);
    CHECK(result.cost == doctest::Approx(clustering_cost(gram, result.labels)).epsilon(1e-12));
  }
}

TEST_CASE("cost is invariant under label permutation") {
  Matrix points = testing::random_matrix(20, 2, 77, 0.0, 1.0);
  GramMatrix gram = gram_matrix(KernelSpec::gaussian_spec(1.0), points);
  auto labels = testing::random_labels(20, 3, 78);
  std::vector<int> permuted(labels.size());
  int perm[3] = {2, 0, 1};
  for (std::size_t i = 0; i < labels.size(); ++i) permuted[i] = perm[labels[i]];
  CHECK(clustering_cost(gram, labels) ==
        doctest::Approx(clustering_cost(gram, permuted)).epsilon(1e-12));
}

TEST_CASE("kernel trick identity for explicit feature maps") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Matrix points = testing::random_matrix(10, 3, 200 + seed, -1.5, 1.5);
    auto labels = testing::random_labels(10, 3, 300 + seed);
    GramMatrix lin = gram_matrix(KernelSpec::linear_spec(), points);
    GramMatrix quad = gram_matrix(KernelSpec::quadratic_spec(), points);
    for (int p = 0; p < 10; ++p) {
      int c = labels[p];
      CHECK(point_to_cluster_sqdist(lin, labels, p, c) ==
            doctest::Approx(explicit_sqdist(points, labels, p, c, linear_psi))
                .epsilon(1e-9));
      CHECK(point_to_cluster_sqdist(quad, labels, p, c) ==
            doctest::Approx(explicit_sqdist(points, labels, p, c, quadratic_psi))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("decoupling sandwich for product kernels") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    int d = 2 + static_cast<int>(seed % 3);
    Matrix points = testing::random_matrix(15, d, 400 + seed, 0.0, 2.0);
    auto labels = testing::random_labels(15, 3, 500 + seed);
    for (auto spec : {KernelSpec::gaussian_spec(0.8), KernelSpec::laplace_spec(1.2)}) {
      GramMatrix gram = gram_matrix(spec, points);
      double cost = clustering_cost(gram, labels);
      double sum = 0.0;
      for (int dim = 0; dim < d; ++dim) {
        sum += clustering_cost(component_gram_matrix(spec, points, dim), labels);
      }
      CHECK(cost <= sum + 1e-9);
      CHECK(sum <= d * cost + 1e-9);
    }
  }
}

}  // TEST_SUITE
