#pragma once

#include <Eigen/Dense>
#include <string>

namespace ikclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelFamily {
  gaussian,
  laplace,
  linear,
  quadratic,
  epsilon_neighborhood,
  hellinger,
  histogram_intersection,
  additive_chi2,
};

std::string family_name(KernelFamily family);
KernelFamily family_from_name(const std::string& name);

// A kernel family with its parameters. gamma is the bandwidth of the
// gaussian/laplace kernels, epsilon the radius of the neighborhood kernel,
// beta the exponent of the generalized histogram intersection kernel.
//
// The epsilon-neighborhood kernel is deliberately kept even though it is not
// positive definite (psd() == false); downstream code accepts it without
// eigenvalue checks.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double gamma = 1.0;
  double epsilon = 1.0;
  double beta = 1.0;

  bool psd() const { return family != KernelFamily::epsilon_neighborhood; }

  // K(x,y) = prod_i K_i(x_i, y_i) with K_i(z,z) = 1
  bool product_family() const {
    return family == KernelFamily::gaussian || family == KernelFamily::laplace;
  }

  // K(x,y) = sum_i K_i(x_i, y_i)
  bool additive_family() const {
    return family == KernelFamily::hellinger ||
           family == KernelFamily::histogram_intersection ||
           family == KernelFamily::additive_chi2;
  }

  bool decomposable() const { return product_family() || additive_family(); }

  void validate() const;

  static KernelSpec gaussian_spec(double gamma) { return {KernelFamily::gaussian, gamma, 1.0, 1.0}; }
  static KernelSpec laplace_spec(double gamma) { return {KernelFamily::laplace, gamma, 1.0, 1.0}; }
  static KernelSpec linear_spec() { return {KernelFamily::linear, 1.0, 1.0, 1.0}; }
  static KernelSpec quadratic_spec() { return {KernelFamily::quadratic, 1.0, 1.0, 1.0}; }
  static KernelSpec epsilon_spec(double epsilon) {
    return {KernelFamily::epsilon_neighborhood, 1.0, epsilon, 1.0};
  }
  static KernelSpec hellinger_spec() { return {KernelFamily::hellinger, 1.0, 1.0, 1.0}; }
  static KernelSpec hik_spec(double beta) {
    return {KernelFamily::histogram_intersection, 1.0, 1.0, beta};
  }
  static KernelSpec chi2_spec() { return {KernelFamily::additive_chi2, 1.0, 1.0, 1.0}; }
};

struct GramMatrix {
  Matrix values;
  KernelSpec spec;

  int point_count() const { return static_cast<int>(values.rows()); }
};

// Pointwise kernel value. Throws on dimension mismatch and on coordinates
// outside the kernel's domain (the message names the offending coordinate).
double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y);

// One-dimensional component K_i(a, b) of a product or additive kernel.
// Throws for non-decomposable families (linear, quadratic, epsilon).
double eval_component_kernel(const KernelSpec& spec, int dim, double a, double b);

// Dense n x n Gram matrix, computed once per pair and mirrored.
GramMatrix gram_matrix(const KernelSpec& spec, const Matrix& points);

// Gram matrix of the one-dimensional component kernel K_i on coordinate dim.
GramMatrix component_gram_matrix(const KernelSpec& spec, const Matrix& points, int dim);

}  // namespace ikclust
