#pragma once

// Dense and sparse linear algebra used throughout the library.
//
// Storage is Eigen's. Dense LU, determinant, least squares and the
// generalized eigen iteration are implemented here; sparse factorization is
// delegated to Eigen::SparseLU.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "afw3d/config.hpp"

namespace afw3d {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Builds a sparse matrix from triplets; duplicates are summed.
SparseMatrix sparse_from_triplets(Eigen::Index rows, Eigen::Index cols,
                                  const std::vector<Triplet>& triplets);

/// Partial-pivoted LU factorization of a square dense matrix.
class DenseLU {
 public:
  explicit DenseLU(const DenseMatrix& a, double pivot_tol = default_tolerances().lu_pivot);

  /// Throws SingularMatrix if the factorization hit a pivot below tolerance.
  Vector solve(const Vector& b) const;
  DenseMatrix solve(const DenseMatrix& b) const;

  bool singular() const { return singular_; }
  Eigen::Index size() const { return lu_.rows(); }
  /// Sign of the determinant (0 if singular).
  int det_sign() const;
  /// Natural log of |det|; -inf if singular.
  double det_logmag() const;

 private:
  DenseMatrix lu_;
  std::vector<Eigen::Index> perm_;
  int perm_sign_ = 1;
  bool singular_ = false;
};

/// Solves A x = b with partial pivoting. Throws SingularMatrix.
Vector lu_solve(const DenseMatrix& a, const Vector& b);

struct DetSignLog {
  int sign = 0;
  double logmag = -std::numeric_limits<double>::infinity();
};

/// Sign and log-magnitude of det(A). A singular matrix gives {0, -inf}.
DetSignLog det_sign_and_logmag(const DenseMatrix& a);

/// Minimizes ||A x - b||_2 by Householder QR. Throws RankDeficient.
Vector least_squares(const DenseMatrix& a, const Vector& b,
                     double rank_tol = default_tolerances().rank);

/// Orthonormal basis (columns) of the null space of A, using a singular value
/// cutoff of tol * max(1, sigma_max).
DenseMatrix null_space(const DenseMatrix& a, double tol = default_tolerances().rank);

/// Numerical rank with cutoff tol * sigma_max.
Eigen::Index numerical_rank(const DenseMatrix& a, double tol = default_tolerances().rank);

/// Sparse direct solver (Eigen SparseLU with COLAMD ordering).
class SparseDirectSolver {
 public:
  explicit SparseDirectSolver(const SparseMatrix& a);
  Vector solve(const Vector& b) const;
  DenseMatrix solve(const DenseMatrix& b) const;

 private:
  std::unique_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  double residual = 0.0;
};

struct EigOptions {
  int max_iterations = default_tolerances().eig_max_iterations;
  double tol = default_tolerances().eig_residual;
  int block_size = 8;
  double shift = 0.0;
};

/// Smallest eigenpair of the symmetric pencil A x = lambda B x (B positive
/// definite) by shift-invert block subspace iteration with Rayleigh-Ritz.
/// The returned vector is B-normalized. Throws NoConvergence.
EigenPair sym_generalized_eig_min(const SparseMatrix& a, const SparseMatrix& b,
                                  const EigOptions& opts = {});
EigenPair sym_generalized_eig_min(const DenseMatrix& a, const DenseMatrix& b,
                                  const EigOptions& opts = {});

/// Eigenvalues of the small dense symmetric pencil (A, B), ascending, with
/// B-orthonormal eigenvectors. Cyclic Jacobi on the Cholesky-reduced matrix.
void dense_sym_generalized_eig(const DenseMatrix& a, const DenseMatrix& b, Vector& values,
                               DenseMatrix& vectors);

}  // namespace afw3d
