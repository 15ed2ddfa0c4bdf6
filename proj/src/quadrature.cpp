#include "afw3d/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "afw3d/config.hpp"
#include "afw3d/errors.hpp"

namespace afw3d {

void gauss_legendre01(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes(n - 1 - i) = 0.5 * (x + 1.0);
    weights(n - 1 - i) = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

QuadRule build_rule(int dim, int degree) {
  QuadRule q;
  q.dim = dim;
  q.degree = degree;
  const int n = std::max(1, (degree + dim + 1) / 2);
  Eigen::VectorXd x, w;
  gauss_legendre01(n, x, w);
  if (dim == 1) {
    q.points = Eigen::MatrixX3d::Zero(n, 3);
    q.points.col(0) = x;
    q.weights = w;
  } else if (dim == 2) {
    q.points = Eigen::MatrixX3d::Zero(n * n, 3);
    q.weights.resize(n * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j, ++k) {
        const double u = x(i), v = x(j);
        q.points(k, 0) = u * (1.0 - v);
        q.points(k, 1) = v;
        q.weights(k) = w(i) * w(j) * (1.0 - v);
      }
    }
  } else {
    q.points = Eigen::MatrixX3d::Zero(n * n * n, 3);
    q.weights.resize(n * n * n);
    int m = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k, ++m) {
          const double u = x(i), v = x(j), s = x(k);
          q.points(m, 0) = u * (1.0 - v) * (1.0 - s);
          q.points(m, 1) = v * (1.0 - s);
          q.points(m, 2) = s;
          q.weights(m) = w(i) * w(j) * w(k) * (1.0 - v) * (1.0 - s) * (1.0 - s);
        }
      }
    }
  }
  return q;
}

}  // namespace

const QuadRule& rule_for(int dim, int degree) {
  if (dim < 1 || dim > 3) throw DegreeTooHigh("unsupported simplex dimension " + std::to_string(dim));
  if (degree > kMaxQuadratureDegree) {
    throw DegreeTooHigh("degree " + std::to_string(degree) + " exceeds cap " +
                        std::to_string(kMaxQuadratureDegree));
  }
  if (degree < 0) degree = 0;
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, degree}];
  if (!slot) slot = std::make_unique<QuadRule>(build_rule(dim, degree));
  return *slot;
}

double simplex_monomial_integral(int dim, int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + dim);
}

}  // namespace afw3d
