#include "ikclust/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace ikclust {
namespace {

void check_domain(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                  const char* which) {
  if (spec.family == KernelFamily::hellinger ||
      spec.family == KernelFamily::histogram_intersection) {
    for (int i = 0; i < x.size(); ++i) {
      if (x[i] < 0.0) {
        throw std::domain_error(std::string("kernel ") + family_name(spec.family) +
                                ": negative coordinate " + std::to_string(i) +
                                " in " + which);
      }
    }
  } else if (spec.family == KernelFamily::additive_chi2) {
    for (int i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0)) {
        throw std::domain_error(std::string("kernel additive_chi2: coordinate ") +
                                std::to_string(i) + " in " + which +
                                " must be strictly positive");
      }
    }
  }
}

}  // namespace

std::string family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::laplace: return "laplace";
    case KernelFamily::linear: return "linear";
    case KernelFamily::quadratic: return "quadratic";
    case KernelFamily::epsilon_neighborhood: return "epsilon_neighborhood";
    case KernelFamily::hellinger: return "hellinger";
    case KernelFamily::histogram_intersection: return "histogram_intersection";
    case KernelFamily::additive_chi2: return "additive_chi2";
  }
  throw std::logic_error("unknown kernel family");
}

KernelFamily family_from_name(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "laplace") return KernelFamily::laplace;
  if (name == "linear") return KernelFamily::linear;
  if (name == "quadratic") return KernelFamily::quadratic;
  if (name == "epsilon_neighborhood" || name == "epsilon") return KernelFamily::epsilon_neighborhood;
  if (name == "hellinger") return KernelFamily::hellinger;
  if (name == "histogram_intersection" || name == "hik") return KernelFamily::histogram_intersection;
  if (name == "additive_chi2" || name == "chi2") return KernelFamily::additive_chi2;
  throw std::invalid_argument("unknown kernel family: " + name);
}

void KernelSpec::validate() const {
  if ((family == KernelFamily::gaussian || family == KernelFamily::laplace) && !(gamma > 0.0)) {
    throw std::invalid_argument("kernel " + family_name(family) + ": gamma must be positive");
  }
  if (family == KernelFamily::epsilon_neighborhood && !(epsilon > 0.0)) {
    throw std::invalid_argument("kernel epsilon_neighborhood: epsilon must be positive");
  }
  if (family == KernelFamily::histogram_intersection && !(beta > 0.0)) {
    throw std::invalid_argument("kernel histogram_intersection: beta must be positive");
  }
}

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("eval_kernel: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
  spec.validate();
  check_domain(spec, x, "x");
  check_domain(spec, y, "y");

  switch (spec.family) {
    case KernelFamily::gaussian:
      return std::exp(-spec.gamma * (x - y).squaredNorm());
    case KernelFamily::laplace:
      return std::exp(-spec.gamma * (x - y).lpNorm<1>());
    case KernelFamily::linear:
      return x.dot(y);
    case KernelFamily::quadratic: {
      double ip = x.dot(y);
      return ip * ip;
    }
    case KernelFamily::epsilon_neighborhood:
      return (x - y).norm() <= spec.epsilon ? 1.0 : 0.0;
    case KernelFamily::hellinger:
      return (x.array() * y.array()).sqrt().sum();
    case KernelFamily::histogram_intersection:
      return x.array().pow(spec.beta).min(y.array().pow(spec.beta)).sum();
    case KernelFamily::additive_chi2:
      return (2.0 * x.array() * y.array() / (x.array() + y.array())).sum();
  }
  throw std::logic_error("unknown kernel family");
}

double eval_component_kernel(const KernelSpec& spec, int dim, double a, double b) {
  (void)dim;
  spec.validate();
  switch (spec.family) {
    case KernelFamily::gaussian:
      return std::exp(-spec.gamma * (a - b) * (a - b));
    case KernelFamily::laplace:
      return std::exp(-spec.gamma * std::abs(a - b));
    case KernelFamily::hellinger:
      if (a < 0.0 || b < 0.0) throw std::domain_error("hellinger component: negative value");
      return std::sqrt(a * b);
    case KernelFamily::histogram_intersection:
      if (a < 0.0 || b < 0.0) throw std::domain_error("hik component: negative value");
      return std::min(std::pow(a, spec.beta), std::pow(b, spec.beta));
    case KernelFamily::additive_chi2:
      if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("chi2 component: value must be positive");
      return 2.0 * a * b / (a + b);
    default:
      throw std::invalid_argument("eval_component_kernel: " + family_name(spec.family) +
                                  " does not decompose per coordinate");
  }
}

GramMatrix gram_matrix(const KernelSpec& spec, const Matrix& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw std::invalid_argument("gram_matrix: empty dataset");
  GramMatrix gram{Matrix(n, n), spec};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double value;
      try {
        value = eval_kernel(spec, points.row(i).transpose(), points.row(j).transpose());
      } catch (const std::domain_error& err) {
        throw std::domain_error(std::string(err.what()) + " (points " +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      gram.values(i, j) = value;
      gram.values(j, i) = value;
    }
  }
  return gram;
}

GramMatrix component_gram_matrix(const KernelSpec& spec, const Matrix& points, int dim) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw std::invalid_argument("component_gram_matrix: empty dataset");
  if (dim < 0 || dim >= points.cols()) {
    throw std::invalid_argument("component_gram_matrix: dim out of range");
  }
  GramMatrix gram{Matrix(n, n), spec};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double value = eval_component_kernel(spec, dim, points(i, dim), points(j, dim));
      gram.values(i, j) = value;
      gram.values(j, i) = value;
    }
  }
  return gram;
}

}  // namespace ikclust
