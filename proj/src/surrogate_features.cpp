#include "ikclust/surrogate_features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ikclust {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBisectTol = 1e-10;

double taylor_coefficient(double gamma, int j) {
  // sqrt((2 gamma)^j / j!)
  return std::exp(0.5 * (j * std::log(2.0 * gamma) - std::lgamma(j + 1.0)));
}

// boundary of {z : phi(z) <= theta} on [a, b], assuming phi(a) <= theta < phi(b)
// or phi(a) > theta >= phi(b); returns the bracket midpoint
double bisect_crossing(const FeatureDescriptor& desc, double theta, double a, double b) {
  bool a_le = eval_feature(desc, a) <= theta;
  for (int iter = 0; iter < 200 && (b - a) > kBisectTol; ++iter) {
    double mid = 0.5 * (a + b);
    if ((eval_feature(desc, mid) <= theta) == a_le) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double eval_feature(const FeatureDescriptor& desc, double x) {
  switch (desc.kind) {
    case FeatureKind::identity:
      return x;
    case FeatureKind::taylor: {
      double z = x + desc.shift;
      return std::pow(z, desc.order_j) * std::exp(-desc.gamma * z * z) *
             taylor_coefficient(desc.gamma, desc.order_j);
    }
    case FeatureKind::distance_anchor: {
      double t = std::abs(x - desc.anchor_value);
      return desc.family == KernelFamily::gaussian ? std::exp(-desc.gamma * t * t)
                                                   : std::exp(-desc.gamma * t);
    }
    case FeatureKind::hellinger:
      return std::sqrt(std::max(0.0, x));
    case FeatureKind::hik_step: {
      if (x < 0.0) return 0.0;
      double powered = std::pow(x, desc.beta);
      return powered >= desc.anchor_value ? desc.step_height : 0.0;
    }
    case FeatureKind::chi2_term: {
      double ratio = static_cast<double>(desc.order_j) / desc.order_m;
      return std::sqrt(2.0 / desc.order_j) * x * std::pow(ratio, x);
    }
  }
  throw std::logic_error("unknown feature kind");
}

FeatureMatrix taylor_features(const Matrix& points, const KernelSpec& spec, int order,
                              double shift_margin) {
  if (order < 0) throw std::invalid_argument("taylor_features: order must be nonnegative");
  if (spec.family != KernelFamily::gaussian) {
    throw std::invalid_argument("taylor_features: only the gaussian kernel has Taylor surrogates");
  }
  spec.validate();
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  FeatureMatrix features;
  features.source_spec = spec;
  features.order = order;
  features.shifts.resize(d);
  for (int i = 0; i < d; ++i) {
    features.shifts[i] = shift_margin - points.col(i).minCoeff();
  }
  features.values = Matrix(n, d * (order + 1));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= order; ++j) {
      FeatureDescriptor desc;
      desc.input_dim = i;
      desc.component = j;
      desc.kind = FeatureKind::taylor;
      desc.family = KernelFamily::gaussian;
      desc.gamma = spec.gamma;
      desc.order_j = j;
      desc.order_m = order;
      desc.shift = features.shifts[i];
      if (j == 0) {
        desc.profile = MonotoneProfile::decreasing;
      } else {
        desc.profile = MonotoneProfile::unimodal;
        desc.peak = std::sqrt(j / (2.0 * spec.gamma)) - desc.shift;
      }
      int col = i * (order + 1) + j;
      for (int r = 0; r < n; ++r) {
        features.values(r, col) = eval_feature(desc, points(r, i));
      }
      features.descriptors.push_back(desc);
    }
  }
  return features;
}

FeatureMatrix distance_features(const Matrix& points, const KernelSpec& spec) {
  if (!spec.product_family()) {
    throw std::invalid_argument(
        "distance_features: requires a distance-based product kernel (gaussian or laplace)");
  }
  spec.validate();
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  FeatureMatrix features;
  features.source_spec = spec;
  features.values = Matrix(n, d * n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < n; ++j) {
      FeatureDescriptor desc;
      desc.input_dim = i;
      desc.component = j;
      desc.kind = FeatureKind::distance_anchor;
      desc.family = spec.family;
      desc.gamma = spec.gamma;
      desc.anchor_value = points(j, i);
      desc.profile = MonotoneProfile::unimodal;
      desc.peak = desc.anchor_value;
      int col = i * n + j;
      for (int r = 0; r < n; ++r) {
        features.values(r, col) = eval_feature(desc, points(r, i));
      }
      features.descriptors.push_back(desc);
    }
  }
  return features;
}

FeatureMatrix additive_features(const Matrix& points, const KernelSpec& spec, int order) {
  if (!spec.additive_family()) {
    throw std::invalid_argument("additive_features: requires an additive kernel family");
  }
  spec.validate();
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  for (int i = 0; i < d; ++i) {
    for (int r = 0; r < n; ++r) {
      double v = points(r, i);
      if (spec.family == KernelFamily::additive_chi2 ? !(v > 0.0) : v < 0.0) {
        throw std::domain_error("additive_features: coordinate " + std::to_string(i) +
                                " of point " + std::to_string(r) +
                                " outside the kernel domain");
      }
    }
  }

  FeatureMatrix features;
  features.source_spec = spec;
  features.order = order;
  std::vector<FeatureDescriptor> descs;

  if (spec.family == KernelFamily::hellinger) {
    for (int i = 0; i < d; ++i) {
      FeatureDescriptor desc;
      desc.input_dim = i;
      desc.kind = FeatureKind::hellinger;
      desc.profile = MonotoneProfile::increasing;
      descs.push_back(desc);
    }
  } else if (spec.family == KernelFamily::histogram_intersection) {
    for (int i = 0; i < d; ++i) {
      std::vector<double> powered(n);
      for (int r = 0; r < n; ++r) powered[r] = std::pow(points(r, i), spec.beta);
      std::sort(powered.begin(), powered.end());
      powered.erase(std::unique(powered.begin(), powered.end()), powered.end());
      for (std::size_t j = 0; j < powered.size(); ++j) {
        FeatureDescriptor desc;
        desc.input_dim = i;
        desc.component = static_cast<int>(j);
        desc.kind = FeatureKind::hik_step;
        desc.profile = MonotoneProfile::step;
        desc.beta = spec.beta;
        desc.anchor_value = powered[j];
        desc.step_low = j == 0 ? 0.0 : powered[j - 1];
        desc.step_height = std::sqrt(powered[j] - desc.step_low);
        descs.push_back(desc);
      }
    }
  } else {  // additive_chi2
    if (order < 1) throw std::invalid_argument("additive_features: chi2 order must be >= 1");
    for (int i = 0; i < d; ++i) {
      for (int j = 1; j <= order; ++j) {
        FeatureDescriptor desc;
        desc.input_dim = i;
        desc.component = j;
        desc.kind = FeatureKind::chi2_term;
        desc.order_j = j;
        desc.order_m = order;
        if (j == order) {
          desc.profile = MonotoneProfile::increasing;
        } else {
          desc.profile = MonotoneProfile::unimodal;
          desc.peak = 1.0 / std::log(static_cast<double>(order) / j);
        }
        descs.push_back(desc);
      }
    }
  }

  features.descriptors = std::move(descs);
  features.values = Matrix(n, static_cast<int>(features.descriptors.size()));
  for (int c = 0; c < features.feature_count(); ++c) {
    const auto& desc = features.descriptors[c];
    for (int r = 0; r < n; ++r) {
      features.values(r, c) = eval_feature(desc, points(r, desc.input_dim));
    }
  }
  return features;
}

FeatureMatrix identity_features(const Matrix& points) {
  FeatureMatrix features;
  features.source_spec = KernelSpec::linear_spec();
  features.values = points;
  for (int i = 0; i < points.cols(); ++i) {
    FeatureDescriptor desc;
    desc.input_dim = i;
    desc.kind = FeatureKind::identity;
    desc.profile = MonotoneProfile::increasing;
    features.descriptors.push_back(desc);
  }
  return features;
}

IntervalCut feature_cut_to_interval(const FeatureDescriptor& desc, double theta,
                                    CutDirection direction,
                                    std::pair<double, double> data_range) {
  const double lo = data_range.first;
  const double hi = data_range.second;
  if (!(lo <= hi)) throw std::invalid_argument("feature_cut_to_interval: invalid data range");

  IntervalCut cut;
  cut.input_dim = desc.input_dim;
  cut.inside_goes_left = true;  // inside region = {phi <= theta} unless noted

  switch (desc.profile) {
    case MonotoneProfile::increasing: {
      bool lo_le = eval_feature(desc, lo) <= theta;
      bool hi_le = eval_feature(desc, hi) <= theta;
      if (!lo_le) {
        cut.upper = lo - 1.0;  // vacuous: nothing in range satisfies the predicate
      } else if (hi_le) {
        cut.upper = hi + 1.0;  // vacuous: everything does
      } else {
        cut.upper = bisect_crossing(desc, theta, lo, hi);
      }
      break;
    }
    case MonotoneProfile::decreasing: {
      bool lo_le = eval_feature(desc, lo) <= theta;
      bool hi_le = eval_feature(desc, hi) <= theta;
      if (!hi_le) {
        cut.lower = hi + 1.0;
      } else if (lo_le) {
        cut.lower = lo - 1.0;
      } else {
        cut.lower = bisect_crossing(desc, theta, lo, hi);
      }
      break;
    }
    case MonotoneProfile::unimodal: {
      // inside region = superlevel set {phi > theta}, an interval around the peak
      cut.inside_goes_left = false;
      auto park_empty = [&] {
        cut.lower = lo - 2.0;
        cut.upper = lo - 1.0;
      };
      if (!(eval_feature(desc, desc.peak) > theta)) {
        park_empty();  // superlevel set empty everywhere
      } else if (desc.peak <= lo) {
        // decreasing over the range
        if (!(eval_feature(desc, lo) > theta)) {
          park_empty();
        } else {
          cut.lower = lo - 1.0;
          cut.upper = eval_feature(desc, hi) > theta ? hi + 1.0
                                                     : bisect_crossing(desc, theta, lo, hi);
        }
      } else if (desc.peak >= hi) {
        // increasing over the range
        if (!(eval_feature(desc, hi) > theta)) {
          park_empty();
        } else {
          cut.upper = hi + 1.0;
          cut.lower = eval_feature(desc, lo) > theta ? lo - 1.0
                                                     : bisect_crossing(desc, theta, lo, hi);
        }
      } else {
        cut.lower = eval_feature(desc, lo) > theta
                        ? lo - 1.0
                        : bisect_crossing(desc, theta, lo, desc.peak);
        cut.upper = eval_feature(desc, hi) > theta
                        ? hi + 1.0
                        : bisect_crossing(desc, theta, desc.peak, hi);
      }
      break;
    }
    case MonotoneProfile::step: {
      if (theta < 0.0) {
        cut.upper = lo - 1.0;
      } else if (theta >= desc.step_height) {
        cut.upper = hi + 1.0;
      } else {
        // threshold induced on x^beta: the step rises at anchor_value
        double below = desc.step_low > 0.0 ? std::pow(desc.step_low, 1.0 / desc.beta) : 0.0;
        double at = std::pow(desc.anchor_value, 1.0 / desc.beta);
        cut.upper = 0.5 * (below + at);
      }
      break;
    }
  }
  if (direction == CutDirection::gt) cut.inside_goes_left = !cut.inside_goes_left;
  return cut;
}

IntervalCut translate_and_snap(const FeatureDescriptor& desc, double theta,
                               CutDirection direction,
                               const std::vector<double>& coord_values) {
  if (coord_values.empty()) {
    throw std::invalid_argument("translate_and_snap: no coordinate values");
  }
  std::vector<double> values = coord_values;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  IntervalCut cut = feature_cut_to_interval(desc, theta, direction,
                                            {values.front(), values.back()});

  // authoritative membership comes from the feature predicate itself
  auto inside_expected = [&](double v) {
    bool le = eval_feature(desc, v) <= theta;
    bool left = direction == CutDirection::le ? le : !le;
    return left == cut.inside_goes_left;
  };
  const int m = static_cast<int>(values.size());
  std::vector<bool> inside(m);
  int first_inside = -1, last_inside = -1;
  for (int i = 0; i < m; ++i) {
    inside[i] = inside_expected(values[i]);
    if (inside[i]) {
      if (first_inside < 0) first_inside = i;
      last_inside = i;
    }
  }
  for (int i = first_inside; first_inside >= 0 && i <= last_inside; ++i) {
    if (!inside[i]) {
      throw std::logic_error(
          "translate_and_snap: feature predicate is not an interval on the data "
          "(inconsistent monotone profile)");
    }
  }

  if (first_inside < 0) {
    // no data inside; park the interval below the data
    cut.lower = values.front() - 2.0;
    cut.upper = values.front() - 1.0;
  } else {
    if (first_inside > 0) {
      cut.lower = 0.5 * (values[first_inside - 1] + values[first_inside]);
    } else if (std::isfinite(cut.lower)) {
      cut.lower = std::min(cut.lower, values.front());
    }
    if (last_inside + 1 < m) {
      cut.upper = 0.5 * (values[last_inside] + values[last_inside + 1]);
    } else if (std::isfinite(cut.upper)) {
      cut.upper = std::max(cut.upper, values.back());
    }
  }

  for (int i = 0; i < m; ++i) {
    bool routed = cut.lower <= values[i] && values[i] <= cut.upper;
    if (routed != inside[i]) {
      throw std::logic_error("translate_and_snap: snapped cut changed the data split");
    }
  }
  if (!(cut.lower < cut.upper) || (!std::isfinite(cut.lower) && !std::isfinite(cut.upper))) {
    throw std::logic_error("translate_and_snap: degenerate interval bounds");
  }
  return cut;
}

Matrix surrogate_centers(const FeatureMatrix& features, const std::vector<int>& labels) {
  const int n = static_cast<int>(features.values.rows());
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("surrogate_centers: label count mismatch");
  }
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  Matrix centers = Matrix::Zero(k, features.values.cols());
  std::vector<int> sizes(k, 0);
  for (int r = 0; r < n; ++r) {
    centers.row(labels[r]) += features.values.row(r);
    ++sizes[labels[r]];
  }
  for (int l = 0; l < k; ++l) {
    if (sizes[l] == 0) {
      throw std::invalid_argument("surrogate_centers: empty cluster " + std::to_string(l));
    }
    centers.row(l) /= sizes[l];
  }
  return centers;
}

double taylor_kernel_abs_error(const Matrix& points, const KernelSpec& spec, int order) {
  FeatureMatrix features = taylor_features(points, spec, order);
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  const int width = order + 1;
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    auto block = features.values.middleCols(i * width, width);
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        double approx = block.row(a).dot(block.row(b));
        double exact = eval_component_kernel(spec, i, points(a, i), points(b, i));
        worst = std::max(worst, std::abs(approx - exact));
      }
    }
  }
  return worst;
}

}  // namespace ikclust
