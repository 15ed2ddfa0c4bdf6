#include "afw3d/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "afw3d/errors.hpp"

namespace afw3d {

SparseMatrix sparse_from_triplets(Eigen::Index rows, Eigen::Index cols,
                                  const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

// ---------------------------------------------------------------- DenseLU --

DenseLU::DenseLU(const DenseMatrix& a, double pivot_tol) : lu_(a) {
  if (a.rows() != a.cols()) {
    throw SingularMatrix("LU of a non-square " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " matrix");
  }
  const Eigen::Index n = a.rows();
  perm_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
  const double scale = n > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  const double floor = pivot_tol * (scale > 0.0 ? scale : 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    lu_.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
    p += k;
    if (std::abs(lu_(p, k)) <= floor) {
      singular_ = true;
      return;
    }
    if (p != k) {
      lu_.row(p).swap(lu_.row(k));
      std::swap(perm_[static_cast<std::size_t>(p)], perm_[static_cast<std::size_t>(k)]);
      perm_sign_ = -perm_sign_;
    }
    const double pivot = lu_(k, k);
    const Eigen::Index rest = n - k - 1;
    if (rest == 0) continue;
    lu_.col(k).tail(rest) /= pivot;
    lu_.bottomRightCorner(rest, rest).noalias() -=
        lu_.col(k).tail(rest) * lu_.row(k).tail(rest);
  }
}

DenseMatrix DenseLU::solve(const DenseMatrix& b) const {
  if (singular_) throw SingularMatrix("pivot below tolerance");
  const Eigen::Index n = lu_.rows();
  DenseMatrix x(n, b.cols());
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = b.row(perm_[static_cast<std::size_t>(i)]);
  lu_.triangularView<Eigen::UnitLower>().solveInPlace(x);
  lu_.triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Vector DenseLU::solve(const Vector& b) const {
  DenseMatrix x = solve(DenseMatrix(b));
  return x.col(0);
}

int DenseLU::det_sign() const {
  if (singular_) return 0;
  int s = perm_sign_;
  for (Eigen::Index i = 0; i < lu_.rows(); ++i) {
    if (lu_(i, i) < 0) s = -s;
  }
  return s;
}

double DenseLU::det_logmag() const {
  if (singular_) return -std::numeric_limits<double>::infinity();
  double l = 0.0;
  for (Eigen::Index i = 0; i < lu_.rows(); ++i) l += std::log(std::abs(lu_(i, i)));
  return l;
}

Vector lu_solve(const DenseMatrix& a, const Vector& b) {
  DenseLU lu(a);
  return lu.solve(b);
}

DetSignLog det_sign_and_logmag(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  if (a.rows() == 0) return {1, 0.0};
  DenseLU lu(a, 1e-14);
  return {lu.det_sign(), lu.det_logmag()};
}

// ---------------------------------------------------------- least squares --

Vector least_squares(const DenseMatrix& a, const Vector& b, double rank_tol) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m < n) throw RankDeficient("fewer rows than columns");
  DenseMatrix r = a;
  Vector y = b;
  const double anorm = a.norm();
  for (Eigen::Index k = 0; k < n; ++k) {
    auto x = r.col(k).tail(m - k);
    const double alpha = x.norm();
    if (alpha <= rank_tol * anorm || alpha == 0.0) {
      throw RankDeficient("column " + std::to_string(k) + " is numerically dependent");
    }
    Vector v = x;
    v(0) += (x(0) >= 0 ? alpha : -alpha);
    const double vnorm2 = v.squaredNorm();
    // Apply H = I - 2 v v^T / (v^T v) to the trailing block and to y.
    for (Eigen::Index j = k; j < n; ++j) {
      const double s = 2.0 * v.dot(r.col(j).tail(m - k)) / vnorm2;
      r.col(j).tail(m - k) -= s * v;
    }
    const double s = 2.0 * v.dot(y.tail(m - k)) / vnorm2;
    y.tail(m - k) -= s * v;
    if (std::abs(r(k, k)) <= rank_tol * anorm) {
      throw RankDeficient("diagonal of R below tolerance at column " + std::to_string(k));
    }
  }
  Vector x = y.head(n);
  r.topLeftCorner(n, n).triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

// -------------------------------------------------------------- null space --

DenseMatrix null_space(const DenseMatrix& a, double tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || n == 0) return DenseMatrix::Identity(n, n);
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

Eigen::Index numerical_rank(const DenseMatrix& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<DenseMatrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol * s(0)) ++rank;
  }
  return rank;
}

// ------------------------------------------------------ sparse direct solve --

SparseDirectSolver::SparseDirectSolver(const SparseMatrix& a)
    : lu_(std::make_unique<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>()) {
  lu_->analyzePattern(a);
  lu_->factorize(a);
  if (lu_->info() != Eigen::Success) {
    throw FactorizationBreakdown("sparse LU failed: " + lu_->lastErrorMessage());
  }
}

Vector SparseDirectSolver::solve(const Vector& b) const {
  Vector x = lu_->solve(b);
  if (lu_->info() != Eigen::Success) throw FactorizationBreakdown("sparse LU solve failed");
  return x;
}

DenseMatrix SparseDirectSolver::solve(const DenseMatrix& b) const {
  DenseMatrix x = lu_->solve(b);
  if (lu_->info() != Eigen::Success) throw FactorizationBreakdown("sparse LU solve failed");
  return x;
}

// --------------------------------------------------- generalized eigen pairs --

void dense_sym_generalized_eig(const DenseMatrix& a, const DenseMatrix& b, Vector& values,
                               DenseMatrix& vectors) {
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(a, b);
  if (es.info() != Eigen::Success) throw NoConvergence("dense generalized eigensolve failed");
  values = es.eigenvalues();
  vectors = es.eigenvectors();
}

namespace {

template <class MatA, class MatB, class Solve>
EigenPair subspace_iteration(const MatA& a, const MatB& b, const Solve& shifted_solve,
                             const EigOptions& opts) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = std::min<Eigen::Index>(std::max(1, opts.block_size), n);
  std::mt19937_64 rng(20090117);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix x(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = dist(rng);

  EigenPair best;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    DenseMatrix bx = b * x;
    DenseMatrix y = shifted_solve(bx);
    Eigen::HouseholderQR<DenseMatrix> qr(y);
    DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n, p);
    DenseMatrix aq = a * q;
    DenseMatrix bq = b * q;
    DenseMatrix ar = q.transpose() * aq;
    DenseMatrix br = q.transpose() * bq;
    ar = 0.5 * (ar + ar.transpose()).eval();
    br = 0.5 * (br + br.transpose()).eval();
    Vector vals;
    DenseMatrix vecs;
    dense_sym_generalized_eig(ar, br, vals, vecs);
    x = q * vecs;
    const Vector v = x.col(0);
    const Vector av = aq * vecs.col(0);
    const Vector bv = bq * vecs.col(0);
    const double lambda = vals(0);
    const double res = (av - lambda * bv).norm();
    const double scale = av.norm() + std::abs(lambda) * bv.norm();
    best.value = lambda;
    best.vector = v;
    best.iterations = it;
    best.residual = scale > 0.0 ? res / scale : res;
    if (res <= opts.tol * std::max(scale, 1e-300) || res == 0.0) return best;
  }
  throw NoConvergence("generalized eigen iteration did not converge in " +
                      std::to_string(opts.max_iterations) + " iterations (relative residual " +
                      std::to_string(best.residual) + ")");
}

}  // namespace

EigenPair sym_generalized_eig_min(const SparseMatrix& a, const SparseMatrix& b,
                                  const EigOptions& opts) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionMismatch("pencil blocks must be square and of equal size");
  }
  if (a.rows() <= opts.block_size) {
    return sym_generalized_eig_min(DenseMatrix(a), DenseMatrix(b), opts);
  }
  double shift = opts.shift;
  std::unique_ptr<SparseDirectSolver> solver;
  for (int attempt = 0; attempt < 2 && !solver; ++attempt) {
    try {
      SparseMatrix shifted = a - shift * b;
      solver = std::make_unique<SparseDirectSolver>(shifted);
    } catch (const FactorizationBreakdown&) {
      double anorm = 0.0;
      for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
          anorm = std::max(anorm, std::abs(it.value()));
      shift = -1e-8 * std::max(anorm, 1.0);
    }
  }
  if (!solver) throw FactorizationBreakdown("shifted pencil could not be factorized");
  EigenPair r = subspace_iteration(
      a, b, [&](const DenseMatrix& rhs) { return solver->solve(rhs); }, opts);
  return r;
}

EigenPair sym_generalized_eig_min(const DenseMatrix& a, const DenseMatrix& b,
                                  const EigOptions& opts) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionMismatch("pencil blocks must be square and of equal size");
  }
  if (a.rows() == 0) throw DimensionMismatch("empty pencil");
  double shift = opts.shift;
  std::unique_ptr<DenseLU> lu = std::make_unique<DenseLU>(a - shift * b);
  if (lu->singular()) {
    shift = -1e-8 * std::max(a.cwiseAbs().maxCoeff(), 1.0);
    lu = std::make_unique<DenseLU>(a - shift * b);
    if (lu->singular()) throw FactorizationBreakdown("shifted pencil is singular");
  }
  return subspace_iteration(
      a, b, [&](const DenseMatrix& rhs) { return lu->solve(rhs); }, opts);
}

}  // namespace afw3d
