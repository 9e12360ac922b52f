#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "ikclust/kernels.hpp"

namespace ikclust {

enum class FeatureKind { taylor, distance_anchor, hellinger, hik_step, chi2_term, identity };
enum class MonotoneProfile { increasing, decreasing, unimodal, step };

// One surrogate feature column. Every column is a function of exactly one
// input coordinate; the descriptor carries enough parameters to re-evaluate
// the column function and to invert threshold cuts on it.
struct FeatureDescriptor {
  int input_dim = 0;
  int component = 0;
  FeatureKind kind = FeatureKind::identity;
  MonotoneProfile profile = MonotoneProfile::increasing;
  KernelFamily family = KernelFamily::linear;

  double anchor_value = 0.0;  // distance_anchor: x_i^(j); hik_step: z_j (power space)
  double peak = 0.0;          // unimodal: the unique critical point, input coordinates
  double gamma = 0.0;
  double beta = 1.0;
  int order_j = 0;
  int order_m = 0;
  double shift = 0.0;         // taylor: additive shift applied to the coordinate
  double step_low = 0.0;      // hik_step: z_{j-1} in power space (0 for j = 1)
  double step_height = 0.0;   // hik_step: sqrt(z_j - z_{j-1})
};

// Column value at input-space coordinate x.
double eval_feature(const FeatureDescriptor& desc, double x);

struct FeatureMatrix {
  Matrix values;  // n x D
  std::vector<FeatureDescriptor> descriptors;
  KernelSpec source_spec;
  int order = 0;               // taylor / chi2 order M
  std::vector<double> shifts;  // per input dim; empty when no shift applied

  int feature_count() const { return static_cast<int>(values.cols()); }
};

// Axis-aligned interval cut x_i in [lower, upper] (closed; one bound may be
// infinite). Points inside go to the side indicated by inside_goes_left.
struct IntervalCut {
  int input_dim = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool inside_goes_left = true;
};

// Gaussian-kernel Taylor features of order M. Coordinates are shifted so each
// minimum sits shift_margin above zero (the clustering cost is shift
// invariant); the shifts are recorded and undone during cut translation.
// Column (i, j) holds z^j exp(-gamma z^2) sqrt((2 gamma)^j / j!) with
// z = x_i + shift_i, giving D = d (M+1) columns.
FeatureMatrix taylor_features(const Matrix& points, const KernelSpec& spec, int order,
                              double shift_margin = 0.1);

// Anchor features for distance-based product kernels: column (i, j) holds
// h(|x_i - x_i^(j)|), one column per (coordinate, data point), D = d n.
FeatureMatrix distance_features(const Matrix& points, const KernelSpec& spec);

// Feature maps of the additive kernels. Hellinger and histogram intersection
// reproduce the kernel exactly on the construction data; the chi2 map is an
// order-M quadrature approximation.
FeatureMatrix additive_features(const Matrix& points, const KernelSpec& spec, int order = 5);

// Raw coordinates (the feature map of the linear kernel).
FeatureMatrix identity_features(const Matrix& points);

// Predicate orientation of a feature-space threshold cut.
enum class CutDirection { le, gt };

// Translates the feature-space predicate phi(x_i) <= theta (direction le; gt
// is the complement) into an input-space cut whose left side equals the
// predicate's support for every x_i in data_range. Monotone profiles invert
// directly; unimodal profiles bracket the superlevel set around the peak by
// bisection to absolute tolerance 1e-10.
IntervalCut feature_cut_to_interval(const FeatureDescriptor& desc, double theta,
                                    CutDirection direction,
                                    std::pair<double, double> data_range);

// Same translation, then snaps finite bounds to midpoints between adjacent
// coordinate values so that the induced data split exactly matches the
// feature-side split (verified; throws if the predicate's support is not
// contiguous on the sorted values).
IntervalCut translate_and_snap(const FeatureDescriptor& desc, double theta,
                               CutDirection direction,
                               const std::vector<double>& coord_values);

// Per-cluster means of the feature rows (k x D). Throws on empty clusters.
Matrix surrogate_centers(const FeatureMatrix& features, const std::vector<int>& labels);

// max over coordinates and data pairs of |<phi_i(x), phi_i(y)> - K_i(x_i, y_i)|
// for the order-M Taylor features: the empirical per-coordinate kernel
// approximation error.
double taylor_kernel_abs_error(const Matrix& points, const KernelSpec& spec, int order);

}  // namespace ikclust
