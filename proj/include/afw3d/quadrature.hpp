#pragma once

// Collapsed-coordinate Gauss rules on the reference edge [0,1], triangle
// {(0,0),(1,0),(0,1)} and tetrahedron {0, e1, e2, e3}.

#include <Eigen/Dense>

namespace afw3d {

struct QuadRule {
  int dim = 0;
  int degree = 0;
  /// One point per row; only the first `dim` columns are meaningful.
  Eigen::MatrixX3d points;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return weights.size(); }
};

/// Rule on the reference simplex of dimension dim (1, 2 or 3) integrating all
/// polynomials of total degree <= degree exactly. Rules are built once and
/// cached. Throws DegreeTooHigh above kMaxQuadratureDegree.
const QuadRule& rule_for(int dim, int degree);

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre01(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Closed form a! b! c! / (a + b + c + dim)! for the reference simplex of
/// dimension dim (unused exponents must be 0).
double simplex_monomial_integral(int dim, int a, int b, int c);

}  // namespace afw3d
