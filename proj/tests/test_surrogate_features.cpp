#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ikclust/surrogate_features.hpp"

using namespace ikclust;

namespace {

// route a coordinate value through a cut the way predict() would
bool cut_sends_left(const IntervalCut& cut, double v) {
  bool inside = cut.lower <= v && v <= cut.upper;
  return inside == cut.inside_goes_left;
}

void check_profile_consistency(const FeatureMatrix& features, const Matrix& points) {
  for (int c = 0; c < features.feature_count(); ++c) {
    const FeatureDescriptor& desc = features.descriptors[c];
    std::vector<double> values(points.col(desc.input_dim).data(),
                               points.col(desc.input_dim).data() + points.rows());
    std::sort(values.begin(), values.end());
    std::vector<double> column;
    column.reserve(values.size());
    for (double v : values) column.push_back(eval_feature(desc, v));
    switch (desc.profile) {
      case MonotoneProfile::increasing:
        for (std::size_t i = 1; i < column.size(); ++i) CHECK(column[i] >= column[i - 1]);
        break;
      case MonotoneProfile::decreasing:
        for (std::size_t i = 1; i < column.size(); ++i) CHECK(column[i] <= column[i - 1]);
        break;
      case MonotoneProfile::unimodal: {
        for (std::size_t i = 1; i < column.size(); ++i) {
          if (values[i] <= desc.peak) CHECK(column[i] >= column[i - 1] - 1e-15);
          if (values[i - 1] >= desc.peak) CHECK(column[i] <= column[i - 1] + 1e-15);
        }
        break;
      }
      case MonotoneProfile::step: {
        for (double v : column) CHECK((v == 0.0 || v == doctest::Approx(desc.step_height)));
        for (std::size_t i = 1; i < column.size(); ++i) CHECK(column[i] >= column[i - 1]);
        break;
      }
    }
  }
}

}  // namespace

TEST_SUITE("surrogate_features") {

TEST_CASE("taylor columns and dimensions") {
  Matrix points = testing::random_matrix(10, 2, 61, 0.0, 2.0);
  KernelSpec spec = KernelSpec::gaussian_spec(1.0);
  FeatureMatrix features = taylor_features(points, spec, 5);
  CHECK(features.feature_count() == 12);  // d (M+1)
  REQUIRE(features.shifts.size() == 2);

  // order-zero column is exp(-gamma z^2) of the shifted coordinate
  for (int r = 0; r < points.rows(); ++r) {
    double z = points(r, 0) + features.shifts[0];
    CHECK(features.values(r, 0) == doctest::Approx(std::exp(-z * z)).epsilon(1e-12));
  }
  // peak of the j-th column sits at sqrt(j / (2 gamma)) in shifted coordinates
  const FeatureDescriptor& d2 = features.descriptors[2];
  CHECK(d2.order_j == 2);
  CHECK(d2.peak + d2.shift == doctest::Approx(1.0));

  CHECK_THROWS_AS(taylor_features(points, spec, -1), std::invalid_argument);
  CHECK_THROWS_AS(taylor_features(points, KernelSpec::laplace_spec(1.0), 3),
                  std::invalid_argument);
  check_profile_consistency(features, points);
}

TEST_CASE("taylor approximation error shrinks with the order") {
  Matrix points = testing::random_matrix(24, 1, 62, 1e-3, 2.0);
  KernelSpec spec = KernelSpec::gaussian_spec(1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (int order : {1, 2, 4, 8, 16, 30}) {
    double err = taylor_kernel_abs_error(points, spec, order);
    CHECK(err <= previous + 1e-15);
    previous = err;
  }
  CHECK(previous < 1e-6);
}

TEST_CASE("distance anchor features") {
  Matrix points = testing::random_matrix(5, 3, 63, -1.0, 1.0);
  FeatureMatrix features = distance_features(points, KernelSpec::laplace_spec(1.0));
  CHECK(features.feature_count() == 15);  // d * n
  // self anchor evaluates to h(0) = 1
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(features.values(j, i * 5 + j) == doctest::Approx(1.0));
    }
  }
  FeatureDescriptor probe;
  probe.kind = FeatureKind::distance_anchor;
  probe.family = KernelFamily::laplace;
  probe.gamma = 1.0;
  probe.anchor_value = 0.0;
  CHECK(eval_feature(probe, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS_AS(distance_features(points, KernelSpec::linear_spec()), std::invalid_argument);
  check_profile_consistency(features, points);
}

TEST_CASE("hellinger features are exact square roots") {
  Matrix points(1, 2);
  points << 4.0, 9.0;
  FeatureMatrix features = additive_features(points, KernelSpec::hellinger_spec());
  CHECK(features.values(0, 0) == doctest::Approx(2.0));
  CHECK(features.values(0, 1) == doctest::Approx(3.0));
}

TEST_CASE("histogram intersection features reproduce the kernel") {
  Matrix tiny(2, 1);
  tiny << 1.0, 3.0;
  FeatureMatrix features = additive_features(tiny, KernelSpec::hik_spec(1.0));
  REQUIRE(features.feature_count() == 2);
  CHECK(features.values(0, 0) == doctest::Approx(1.0));
  CHECK(features.values(0, 1) == doctest::Approx(0.0));
  CHECK(features.values(1, 0) == doctest::Approx(1.0));
  CHECK(features.values(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(features.values.row(0).dot(features.values.row(1)) == doctest::Approx(1.0));

  for (std::uint64_t seed : {70, 71, 72}) {
    Matrix points = testing::random_matrix(12, 3, seed, 0.0, 3.0);
    KernelSpec spec = KernelSpec::hik_spec(seed == 71 ? 2.0 : 1.0);
    FeatureMatrix map = additive_features(points, spec);
    GramMatrix gram = gram_matrix(spec, points);
    Matrix reconstructed = map.values * map.values.transpose();
    CHECK((reconstructed - gram.values).cwiseAbs().maxCoeff() < 1e-12);
    check_profile_consistency(map, points);
  }
}

TEST_CASE("chi2 features") {
  Matrix points = testing::random_matrix(8, 2, 80, 0.05, 1.0);
  FeatureMatrix features = additive_features(points, KernelSpec::chi2_spec(), 5);
  CHECK(features.feature_count() == 10);  // d * M
  // the j = M column is linear: sqrt(2/M) x
  for (int r = 0; r < 8; ++r) {
    CHECK(features.values(r, 4) ==
          doctest::Approx(std::sqrt(2.0 / 5.0) * points(r, 0)).epsilon(1e-12));
  }
  check_profile_consistency(features, points);

  Matrix bad(1, 2);
  bad << 0.5, 0.0;
  CHECK_THROWS_WITH_AS(additive_features(bad, KernelSpec::chi2_spec(), 5),
                       doctest::Contains("coordinate 1"), std::domain_error);
}

TEST_CASE("columns depend on exactly one input coordinate") {
  Matrix points = testing::random_matrix(9, 3, 90, 0.1, 2.0);
  Matrix shuffled = points;
  // reverse a different coordinate and rebuild: columns of dim 0 must not move
  for (int r = 0; r < 9; ++r) shuffled(r, 1) = points(8 - r, 1);

  auto check_first_dim_stable = [&](const FeatureMatrix& a, const FeatureMatrix& b) {
    for (int c = 0; c < a.feature_count(); ++c) {
      if (a.descriptors[c].input_dim != 0) continue;
      CHECK((a.values.col(c) - b.values.col(c)).cwiseAbs().maxCoeff() == 0.0);
    }
  };
  check_first_dim_stable(distance_features(points, KernelSpec::laplace_spec(1.0)),
                         distance_features(shuffled, KernelSpec::laplace_spec(1.0)));
  check_first_dim_stable(taylor_features(points, KernelSpec::gaussian_spec(1.0), 4),
                         taylor_features(shuffled, KernelSpec::gaussian_spec(1.0), 4));
  check_first_dim_stable(additive_features(points, KernelSpec::hik_spec(1.0)),
                         additive_features(shuffled, KernelSpec::hik_spec(1.0)));
  check_first_dim_stable(additive_features(points, KernelSpec::chi2_spec(), 4),
                         additive_features(shuffled, KernelSpec::chi2_spec(), 4));
}

TEST_CASE("cut translation for monotone and anchored profiles") {
  // laplace anchor: phi <= theta means |x - a| >= ln(1/theta) / gamma
  FeatureDescriptor anchor;
  anchor.kind = FeatureKind::distance_anchor;
  anchor.family = KernelFamily::laplace;
  anchor.profile = MonotoneProfile::unimodal;
  anchor.gamma = 1.5;
  anchor.anchor_value = 0.3;
  anchor.peak = 0.3;
  double theta = 0.4;
  double radius = std::log(1.0 / theta) / anchor.gamma;
  IntervalCut cut = feature_cut_to_interval(anchor, theta, CutDirection::le, {-3.0, 3.0});
  CHECK_FALSE(cut.inside_goes_left);
  CHECK(cut.lower == doctest::Approx(anchor.anchor_value - radius).epsilon(1e-7));
  CHECK(cut.upper == doctest::Approx(anchor.anchor_value + radius).epsilon(1e-7));

  // order-zero taylor term: phi >= theta means z <= sqrt(ln(1/theta) / gamma)
  FeatureDescriptor zero;
  zero.kind = FeatureKind::taylor;
  zero.gamma = 2.0;
  zero.order_j = 0;
  zero.profile = MonotoneProfile::decreasing;
  double bound = std::sqrt(std::log(1.0 / 0.3) / zero.gamma);
  IntervalCut ge = feature_cut_to_interval(zero, 0.3, CutDirection::gt, {0.01, 3.0});
  for (double v : {0.05, 0.3, bound - 1e-6, bound + 1e-6, 1.5, 2.9}) {
    CHECK(cut_sends_left(ge, v) == (eval_feature(zero, v) > 0.3));
  }
}

TEST_CASE("unimodal translation against a dense grid") {
  FeatureDescriptor desc;
  desc.kind = FeatureKind::taylor;
  desc.gamma = 1.0;
  desc.order_j = 2;
  desc.profile = MonotoneProfile::unimodal;
  desc.peak = 1.0;  // sqrt(j / (2 gamma))
  double peak_value = eval_feature(desc, 1.0);
  double theta = peak_value * 0.95;
  IntervalCut cut = feature_cut_to_interval(desc, theta, CutDirection::le, {0.0, 4.0});
  for (int g = 0; g <= 10000; ++g) {
    double v = 4.0 * g / 10000.0;
    CHECK(cut_sends_left(cut, v) == (eval_feature(desc, v) <= theta));
  }
}

TEST_CASE("snapped cuts reproduce the feature split exactly") {
  Rng rng(123);
  Matrix points = testing::random_matrix(40, 2, 124, 0.05, 2.0);
  std::vector<FeatureMatrix> maps;
  maps.push_back(taylor_features(points, KernelSpec::gaussian_spec(1.3), 4));
  maps.push_back(distance_features(points, KernelSpec::laplace_spec(0.8)));
  maps.push_back(distance_features(points, KernelSpec::gaussian_spec(2.0)));
  maps.push_back(additive_features(points, KernelSpec::hik_spec(1.0)));
  maps.push_back(additive_features(points, KernelSpec::chi2_spec(), 4));
  maps.push_back(additive_features(points, KernelSpec::hellinger_spec()));
  maps.push_back(identity_features(points));
  for (const FeatureMatrix& map : maps) {
    for (int trial = 0; trial < 40; ++trial) {
      int col = rng.uniform_int(map.feature_count());
      const FeatureDescriptor& desc = map.descriptors[col];
      double lo = map.values.col(col).minCoeff();
      double hi = map.values.col(col).maxCoeff();
      if (!(hi > lo)) continue;  // constant column, never a candidate cut
      double theta = lo + (hi - lo) * rng.uniform(0.05, 0.95);
      std::vector<double> coords(points.col(desc.input_dim).data(),
                                 points.col(desc.input_dim).data() + points.rows());
      IntervalCut cut = translate_and_snap(desc, theta, CutDirection::le, coords);
      for (int r = 0; r < points.rows(); ++r) {
        bool feature_left = map.values(r, col) <= theta;
        CHECK(cut_sends_left(cut, points(r, desc.input_dim)) == feature_left);
      }
    }
  }
}

TEST_CASE("surrogate centers") {
  Matrix rows(4, 2);
  rows << 1, 2, 3, 4, 5, 6, 7, 8;
  FeatureMatrix features = identity_features(rows);
  Matrix single = surrogate_centers(features, {0, 0, 0, 0});
  CHECK(single(0, 0) == doctest::Approx(4.0));
  CHECK(single(0, 1) == doctest::Approx(5.0));

  Matrix each = surrogate_centers(features, {0, 1, 2, 3});
  CHECK((each - rows).cwiseAbs().maxCoeff() == 0.0);

  Matrix pairs = surrogate_centers(features, {0, 0, 1, 1});
  CHECK(pairs(0, 0) == doctest::Approx(2.0));
  CHECK(pairs(1, 1) == doctest::Approx(7.0));

  CHECK_THROWS_AS(surrogate_centers(features, std::vector<int>{0, 0, 0, 2}),
                  std::invalid_argument);
}

}  // TEST_SUITE
