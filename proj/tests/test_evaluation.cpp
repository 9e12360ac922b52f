#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ikclust/datasets.hpp"
#include "ikclust/evaluation.hpp"
#include "ikclust/kernel_kmeans.hpp"

using namespace ikclust;

TEST_SUITE("evaluation") {

TEST_CASE("price of explainability") {
  CHECK(price_of_explainability(2.0, 2.0) == doctest::Approx(1.0));
  CHECK(price_of_explainability(3.0, 2.0) == doctest::Approx(1.5));
  CHECK(std::isinf(price_of_explainability(0.5, 0.0)));
  CHECK(price_of_explainability(0.0, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(price_of_explainability(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(price_of_explainability(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("adjusted rand index") {
  CHECK(adjusted_rand_index({0, 0, 1, 1}, {0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(adjusted_rand_index({0, 0, 1, 1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
  // hand contingency table: cells all 1, rows/cols pairs 2+2, C(4,2)=6
  // expected = 4/6 * ... => (0 - 2/3) / (2 - 2/3) = -0.5
  CHECK(adjusted_rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(-0.5));
  CHECK(adjusted_rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) ==
        adjusted_rand_index({0, 1, 0, 1}, {0, 0, 1, 1}));
  CHECK(adjusted_rand_index({5, 5, 9, 9}, {0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(adjusted_rand_index({0, 0, 0, 0}, {0, 0, 0, 0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(adjusted_rand_index({0, 1}, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(adjusted_rand_index({0}, {0}), std::invalid_argument);

  // never exceeds 1 and is near zero in expectation for independent labelings
  Rng rng(7);
  double total = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> a(30), b(30);
    for (int i = 0; i < 30; ++i) {
      a[i] = rng.uniform_int(3);
      b[i] = rng.uniform_int(3);
    }
    double ari = adjusted_rand_index(a, b);
    CHECK(ari <= 1.0);
    total += ari;
  }
  CHECK(std::abs(total / 200.0) < 0.05);
}

TEST_CASE("per dimension costs") {
  Matrix points = testing::random_matrix(12, 1, 501, 0.0, 1.0);
  auto labels = testing::random_labels(12, 3, 502);
  KernelSpec spec = KernelSpec::gaussian_spec(1.4);
  auto costs = per_dimension_costs(points, spec, labels);
  REQUIRE(costs.size() == 1);
  CHECK(costs[0] ==
        doctest::Approx(clustering_cost(gram_matrix(spec, points), labels)).epsilon(1e-12));

  Matrix constant = Matrix::Ones(6, 3);
  std::vector<int> two{0, 0, 0, 1, 1, 1};
  for (double cost : per_dimension_costs(constant, spec, two)) {
    CHECK(cost == doctest::Approx(0.0));
  }

  CHECK_THROWS_AS(per_dimension_costs(points, KernelSpec::hellinger_spec(), labels),
                  std::invalid_argument);
}

TEST_CASE("brute force optimal cost") {
  Dataset quad = gen_quadratic_counterexample();
  GramMatrix qgram = gram_matrix(KernelSpec::quadratic_spec(), quad.points);
  CHECK(brute_force_optimal_cost(qgram, 2) == doctest::Approx(0.0));

  Matrix points = testing::random_matrix(6, 2, 503, 0.0, 1.0);
  GramMatrix gram = gram_matrix(KernelSpec::gaussian_spec(1.0), points);
  CHECK(brute_force_optimal_cost(gram, 6) == doctest::Approx(0.0));

  // 50-restart Lloyd agrees with exhaustive enumeration on small instances
  for (std::uint64_t seed : {504, 505}) {
    Matrix random = testing::random_matrix(8, 2, seed, 0.0, 1.0);
    GramMatrix g = gram_matrix(KernelSpec::gaussian_spec(2.0), random);
    ClusteringResult lloyd = kernel_kmeans(g, 2, {InitMethod::kpp_feature_space, 1, 50, 300});
    CHECK(lloyd.cost == doctest::Approx(brute_force_optimal_cost(g, 2)).epsilon(1e-9));
  }

  Matrix too_big = testing::random_matrix(15, 1, 506, 0.0, 1.0);
  CHECK_THROWS_AS(
      brute_force_optimal_cost(gram_matrix(KernelSpec::linear_spec(), too_big), 2),
      std::invalid_argument);
}

TEST_CASE("brute force best tree on separated line clusters") {
  Matrix line(6, 1);
  line << 0.0, 0.1, 5.0, 5.1, 9.0, 9.1;
  GramMatrix gram = gram_matrix(KernelSpec::linear_spec(), line);
  BestTreeResult best = brute_force_best_tree(line, gram, 3, CutMode::one_sided);
  CHECK(best.cost == doctest::Approx(brute_force_optimal_cost(gram, 3)).epsilon(1e-9));
  CHECK(best.tree.k_leaves == 3);
}

TEST_CASE("no threshold tree reproduces the quadratic partition") {
  Dataset quad = gen_quadratic_counterexample();
  GramMatrix gram = gram_matrix(KernelSpec::quadratic_spec(), quad.points);
  BestTreeResult one_sided = brute_force_best_tree(quad.points, gram, 2, CutMode::one_sided);
  CHECK(one_sided.cost > 0.0);
  CHECK(std::isinf(price_of_explainability(one_sided.cost, brute_force_optimal_cost(gram, 2))));

  // two-sided cuts, by contrast, can isolate {x, y} via x1 in [-0.5, 0.5]
  BestTreeResult interval = brute_force_best_tree(quad.points, gram, 2, CutMode::interval);
  CHECK(interval.cost == doctest::Approx(0.0));
}

TEST_CASE("exkmc counterexample at small scale has price one") {
  Dataset data = gen_exkmc_counterexample(0.05, 2);  // n = 12
  GramMatrix gram = gram_matrix(KernelSpec::linear_spec(), data.points);
  BestTreeResult best = brute_force_best_tree(data.points, gram, 3, CutMode::one_sided);
  double optimal = brute_force_optimal_cost(gram, 3);
  CHECK(best.cost == doctest::Approx(optimal).epsilon(1e-9));
  CHECK(price_of_explainability(best.cost, optimal) == doctest::Approx(1.0));
}

TEST_CASE("oracle consistency on random instances") {
  for (std::uint64_t seed : {510, 511, 512}) {
    Matrix points = testing::random_matrix(7, 2, seed, 0.0, 1.0);
    GramMatrix gram = gram_matrix(KernelSpec::laplace_spec(1.0), points);
    ClusteringResult lloyd = kernel_kmeans(gram, 2, {InitMethod::kpp_feature_space, 3, 5, 300});
    CHECK(lloyd.cost >= brute_force_optimal_cost(gram, 2) - 1e-12);
  }
}

}  // TEST_SUITE
