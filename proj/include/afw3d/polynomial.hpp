#pragma once

// Polynomial fields over a graded monomial frame.
//
// A PolySet holds n polynomial fields with `ncomp` components each, in
// `vars` variables, of total degree <= `degree`. Field i, component c is the
// row vector coef.row(i).segment(c * N, N) against the monomials of
// frame(vars, degree), N = frame_size(vars, degree). The frame is graded, so
// frame(vars, d) is a prefix of frame(vars, d + 1).
//
// Matrix-valued fields use ncomp = 9 with component 3 * i + j holding entry
// (i, j); differential operators act row-wise.

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "afw3d/linalg.hpp"
#include "afw3d/tensor_ops.hpp"

namespace afw3d {

using Exponent = std::array<int, 3>;

int frame_size(int vars, int degree);
/// Exponents of frame(vars, degree) in frame order.
const std::vector<Exponent>& frame_exponents(int vars, int degree);
int monomial_index(int vars, const Exponent& e);

/// Values of every monomial of frame(vars, degree) at each point (rows).
DenseMatrix monomial_table(int vars, int degree, const Eigen::MatrixX3d& points);

/// Exact reference-simplex Gram matrix of frame(vars, da) against frame(vars, db).
DenseMatrix monomial_gram(int vars, int da, int db);

class PolySet {
 public:
  PolySet() = default;
  PolySet(int vars, int ncomp, int degree, Eigen::Index count);
  PolySet(int vars, int ncomp, int degree, DenseMatrix coef);

  int vars() const { return vars_; }
  int ncomp() const { return ncomp_; }
  int degree() const { return degree_; }
  int frame() const { return frame_size(vars_, degree_); }
  Eigen::Index size() const { return coef_.rows(); }

  const DenseMatrix& coef() const { return coef_; }
  DenseMatrix& coef() { return coef_; }

  /// Coefficients of component c for all fields (size() x frame()).
  auto component(int c) const { return coef_.middleCols(static_cast<Eigen::Index>(c) * frame(), frame()); }
  auto component(int c) { return coef_.middleCols(static_cast<Eigen::Index>(c) * frame(), frame()); }

  /// Field i alone.
  PolySet member(Eigen::Index i) const;
  /// Fields selected by a linear combination: result row k = sum_j w(k, j) field j.
  PolySet combine(const DenseMatrix& weights) const;
  /// Same fields in a larger frame.
  PolySet raised(int degree) const;
  /// Drops trailing zero degrees (|coef| <= tol).
  int effective_degree(double tol = 0.0) const;

  /// Values at points: entry c holds an (npoints x size()) block.
  std::vector<DenseMatrix> tabulate(const Eigen::MatrixX3d& points) const;
  /// Value of field i at one point.
  Eigen::VectorXd evaluate(Eigen::Index i, const Eigen::Vector3d& p) const;

  PolySet& operator+=(const PolySet& other);
  PolySet& operator*=(double s);

 private:
  int vars_ = 3;
  int ncomp_ = 1;
  int degree_ = 0;
  DenseMatrix coef_;
};

PolySet operator+(PolySet a, const PolySet& b);
PolySet operator-(PolySet a, const PolySet& b);
PolySet operator*(double s, PolySet a);

/// Stacks the fields of two sets with equal vars and ncomp.
PolySet stack(const PolySet& a, const PolySet& b);

/// Partial derivative in variable k; the degree is kept.
PolySet partial(const PolySet& p, int k);
/// Multiplication by the coordinate x_k; the degree grows by one.
PolySet times_coordinate(const PolySet& p, int k);
/// Product of two scalar fields (ncomp == 1) applied member-wise
/// (a.size() == b.size()) or broadcast when one side has a single member.
PolySet multiply_scalar(const PolySet& a, const PolySet& b);

/// Scalar -> vector gradient; vector -> matrix (row i = grad of component i).
PolySet grad(const PolySet& p);
/// Vector -> vector curl; matrix -> matrix, row-wise.
PolySet curl(const PolySet& p);
/// Vector -> scalar divergence; matrix -> vector, row-wise.
PolySet div(const PolySet& p);

/// Component-wise linear map: result component r = sum_c m(r, c) component c.
PolySet map_components(const PolySet& p, const DenseMatrix& m);
/// Matrix fields: pointwise L * U * R with constant L, R.
PolySet sandwich(const Mat3& left, const PolySet& u, const Mat3& right);
/// Matrix fields: pointwise S1 and S2 and transposition.
PolySet s1_field(const PolySet& w);
PolySet s2_field(const PolySet& u);
/// Vector fields: matrix field with the given vector as row `row`.
PolySet as_matrix_row(const PolySet& v, int row);

/// Substitutes x = origin + sum_j y_j * dirs.col(j), producing a field in
/// dirs.cols() variables.
PolySet restrict_affine(const PolySet& p, const Eigen::Vector3d& origin, const Eigen::Matrix3Xd& dirs);
/// Re-expresses a field of reference coordinates in coordinates
/// x = A x_hat + b, i.e. q(x) = p(A^{-1}(x - b)).
PolySet compose_affine_inverse(const PolySet& p, const Mat3& a, const Vec3& b);

/// Exact L2 Gram matrix on the reference simplex of dimension vars.
DenseMatrix l2_gram(const PolySet& a, const PolySet& b);

/// L2-orthonormal basis of span(p) (rank decided at tol). Deterministic.
PolySet orthonormalize(const PolySet& p, double tol = 1e-10);

}  // namespace afw3d
