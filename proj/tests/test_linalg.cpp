#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "afw3d/errors.hpp"
#include "afw3d/linalg.hpp"

using namespace afw3d;

namespace {

DenseMatrix random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  DenseMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = d(rng);
  return a;
}

SparseMatrix to_sparse(const DenseMatrix& a) { return a.sparseView(); }

}  // namespace

TEST(LuSolve, Identity) {
  const Vector x = lu_solve(DenseMatrix::Identity(3, 3), Vector::LinSpaced(3, 1.0, 3.0));
  EXPECT_EQ(x, Vector::LinSpaced(3, 1.0, 3.0));
}

TEST(LuSolve, Diagonal) {
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a.diagonal() << 2.0, 4.0;
  Vector b(2);
  b << 2.0, 4.0;
  const Vector x = lu_solve(a, b);
  EXPECT_DOUBLE_EQ(x(0), 1.0);
  EXPECT_DOUBLE_EQ(x(1), 1.0);
}

TEST(LuSolve, RecoversKnownSolution) {
  const DenseMatrix a = random_matrix(20, 20, 3) + 20.0 * DenseMatrix::Identity(20, 20);
  const Vector xs = random_matrix(20, 1, 4);
  EXPECT_LE((lu_solve(a, a * xs) - xs).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LuSolve, SingularThrows) {
  DenseMatrix a(2, 2);
  a << 1, 2, 2, 4;
  EXPECT_THROW(lu_solve(a, Vector::Ones(2)), SingularMatrix);
}

TEST(DetSignLog, Identity) {
  const DetSignLog d = det_sign_and_logmag(DenseMatrix::Identity(4, 4));
  EXPECT_EQ(d.sign, 1);
  EXPECT_DOUBLE_EQ(d.logmag, 0.0);
}

TEST(DetSignLog, NegativeDiagonal) {
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a.diagonal() << 1.0, -2.0;
  const DetSignLog d = det_sign_and_logmag(a);
  EXPECT_EQ(d.sign, -1);
  EXPECT_NEAR(d.logmag, std::log(2.0), 1e-15);
}

TEST(DetSignLog, SingularSentinel) {
  DenseMatrix a(2, 2);
  a << 1, 2, 2, 4;
  const DetSignLog d = det_sign_and_logmag(a);
  EXPECT_EQ(d.sign, 0);
  EXPECT_TRUE(std::isinf(d.logmag) && d.logmag < 0);
}

TEST(DetSignLog, MatchesEigenDeterminant) {
  const DenseMatrix a = random_matrix(7, 7, 11);
  const DetSignLog d = det_sign_and_logmag(a);
  const double det = a.determinant();
  EXPECT_EQ(d.sign, det > 0 ? 1 : -1);
  EXPECT_NEAR(d.logmag, std::log(std::abs(det)), 1e-12);
}

TEST(GeneralizedEig, Diagonal) {
  DenseMatrix a = DenseMatrix::Zero(3, 3);
  a.diagonal() << 1.0, 2.0, 3.0;
  EXPECT_NEAR(sym_generalized_eig_min(to_sparse(a), to_sparse(DenseMatrix::Identity(3, 3))).value, 1.0, 1e-10);
}

TEST(GeneralizedEig, ScaledPencil) {
  DenseMatrix a = DenseMatrix::Zero(2, 2), b = DenseMatrix::Zero(2, 2);
  a.diagonal() << 4.0, 6.0;
  b.diagonal() << 2.0, 2.0;
  EXPECT_NEAR(sym_generalized_eig_min(to_sparse(a), to_sparse(b)).value, 2.0, 1e-10);
}

TEST(GeneralizedEig, RandomPencilAgainstDenseSolver) {
  const DenseMatrix g = random_matrix(30, 30, 5);
  const DenseMatrix h = random_matrix(30, 30, 6);
  const DenseMatrix a = g * g.transpose() + 0.1 * DenseMatrix::Identity(30, 30);
  const DenseMatrix b = h * h.transpose() + 30.0 * DenseMatrix::Identity(30, 30);
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> oracle(a, b);
  const EigenPair p = sym_generalized_eig_min(to_sparse(a), to_sparse(b));
  EXPECT_NEAR(p.value, oracle.eigenvalues()(0), 1e-7);
  EXPECT_NEAR(p.vector.dot(b * p.vector), 1.0, 1e-8);

  Vector values;
  DenseMatrix vectors;
  dense_sym_generalized_eig(a, b, values, vectors);
  EXPECT_LE((values - oracle.eigenvalues()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LeastSquares, Mean) {
  DenseMatrix a = DenseMatrix::Ones(2, 1);
  Vector b(2);
  b << 0.0, 2.0;
  EXPECT_NEAR(least_squares(a, b)(0), 1.0, 1e-14);
}

TEST(LeastSquares, SquareMatchesLu) {
  const DenseMatrix a = random_matrix(8, 8, 7) + 8.0 * DenseMatrix::Identity(8, 8);
  const Vector b = random_matrix(8, 1, 8);
  EXPECT_LE((least_squares(a, b) - lu_solve(a, b)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LeastSquares, NormalEquationResidual) {
  const DenseMatrix a = random_matrix(40, 10, 9);
  const Vector b = random_matrix(40, 1, 10);
  const Vector x = least_squares(a, b);
  EXPECT_LE((a.transpose() * (a * x - b)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(LeastSquares, RankDeficientThrows) {
  DenseMatrix a(3, 2);
  a << 1, 2, 2, 4, 3, 6;
  EXPECT_THROW(least_squares(a, Vector::Ones(3)), RankDeficient);
}

TEST(NullSpace, RankAndOrthogonality) {
  const DenseMatrix a = random_matrix(4, 3, 12) * random_matrix(3, 7, 13);
  EXPECT_EQ(numerical_rank(a), 3);
  const DenseMatrix n = null_space(a);
  ASSERT_EQ(n.cols(), 4);
  EXPECT_LE((a * n).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((n.transpose() * n - DenseMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SparseDirect, SolvesNonsymmetricSystem) {
  const DenseMatrix a = random_matrix(25, 25, 14) + 10.0 * DenseMatrix::Identity(25, 25);
  const Vector xs = random_matrix(25, 1, 15);
  const SparseDirectSolver s(to_sparse(a));
  EXPECT_LE((s.solve(Vector(a * xs)) - xs).cwiseAbs().maxCoeff(), 1e-11);
}
