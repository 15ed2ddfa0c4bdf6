#include "afw3d/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "afw3d/errors.hpp"
#include "afw3d/quadrature.hpp"

namespace afw3d {

namespace {

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

// Exponents of homogeneous degree d in frame order.
std::vector<Exponent> homogeneous(int vars, int d) {
  std::vector<Exponent> out;
  if (vars == 1) {
    out.push_back({d, 0, 0});
  } else if (vars == 2) {
    for (int a = d; a >= 0; --a) out.push_back({a, d - a, 0});
  } else {
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) out.push_back({a, b, d - a - b});
  }
  return out;
}

void check_compatible(const PolySet& a, const PolySet& b) {
  if (a.vars() != b.vars() || a.ncomp() != b.ncomp()) {
    throw DimensionMismatch("polynomial sets differ in variables or components");
  }
}

}  // namespace

int frame_size(int vars, int degree) {
  if (degree < 0) return 0;
  return binomial(degree + vars, vars);
}

const std::vector<Exponent>& frame_exponents(int vars, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<Exponent>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{vars, degree}];
  if (!slot) {
    slot = std::make_unique<std::vector<Exponent>>();
    for (int d = 0; d <= degree; ++d) {
      auto h = homogeneous(vars, d);
      slot->insert(slot->end(), h.begin(), h.end());
    }
  }
  return *slot;
}

int monomial_index(int vars, const Exponent& e) {
  const int d = e[0] + e[1] + e[2];
  int offset = frame_size(vars, d - 1);
  if (vars == 1) return offset;
  if (vars == 2) return offset + (d - e[0]);
  // a runs from d down; block for a' has d - a' + 1 entries.
  for (int ap = d; ap > e[0]; --ap) offset += d - ap + 1;
  return offset + (d - e[0] - e[1]);
}

DenseMatrix monomial_table(int vars, int degree, const Eigen::MatrixX3d& points) {
  const auto& ex = frame_exponents(vars, degree);
  const Eigen::Index np = points.rows();
  DenseMatrix t(np, static_cast<Eigen::Index>(ex.size()));
  // Powers per variable.
  std::vector<DenseMatrix> pw(static_cast<std::size_t>(vars), DenseMatrix(np, degree + 1));
  for (int v = 0; v < vars; ++v) {
    auto& m = pw[static_cast<std::size_t>(v)];
    m.col(0).setOnes();
    for (int k = 1; k <= degree; ++k) m.col(k) = m.col(k - 1).cwiseProduct(points.col(v));
  }
  for (std::size_t j = 0; j < ex.size(); ++j) {
    Eigen::VectorXd col = pw[0].col(ex[j][0]);
    for (int v = 1; v < vars; ++v) col = col.cwiseProduct(pw[static_cast<std::size_t>(v)].col(ex[j][static_cast<std::size_t>(v)]));
    t.col(static_cast<Eigen::Index>(j)) = col;
  }
  return t;
}

DenseMatrix monomial_gram(int vars, int da, int db) {
  const auto& ea = frame_exponents(vars, da);
  const auto& eb = frame_exponents(vars, db);
  DenseMatrix g(static_cast<Eigen::Index>(ea.size()), static_cast<Eigen::Index>(eb.size()));
  for (std::size_t i = 0; i < ea.size(); ++i)
    for (std::size_t j = 0; j < eb.size(); ++j)
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = simplex_monomial_integral(
          vars, ea[i][0] + eb[j][0], ea[i][1] + eb[j][1], ea[i][2] + eb[j][2]);
  return g;
}

// ---------------------------------------------------------------- PolySet --

PolySet::PolySet(int vars, int ncomp, int degree, Eigen::Index count)
    : vars_(vars), ncomp_(ncomp), degree_(std::max(degree, 0)) {
  coef_ = DenseMatrix::Zero(count, static_cast<Eigen::Index>(ncomp_) * frame());
}

PolySet::PolySet(int vars, int ncomp, int degree, DenseMatrix coef)
    : vars_(vars), ncomp_(ncomp), degree_(std::max(degree, 0)), coef_(std::move(coef)) {
  if (coef_.cols() != static_cast<Eigen::Index>(ncomp_) * frame()) {
    throw DimensionMismatch("coefficient width " + std::to_string(coef_.cols()) +
                            " does not match frame");
  }
}

PolySet PolySet::member(Eigen::Index i) const {
  return PolySet(vars_, ncomp_, degree_, DenseMatrix(coef_.row(i)));
}

PolySet PolySet::combine(const DenseMatrix& weights) const {
  return PolySet(vars_, ncomp_, degree_, DenseMatrix(weights * coef_));
}

PolySet PolySet::raised(int degree) const {
  if (degree <= degree_) return *this;
  PolySet out(vars_, ncomp_, degree, size());
  const int n = frame();
  for (int c = 0; c < ncomp_; ++c) out.component(c).leftCols(n) = component(c);
  return out;
}

int PolySet::effective_degree(double tol) const {
  const auto& ex = frame_exponents(vars_, degree_);
  int deg = -1;
  for (int c = 0; c < ncomp_; ++c) {
    auto block = component(c);
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      if (block.col(j).cwiseAbs().maxCoeff() > tol) {
        const auto& e = ex[static_cast<std::size_t>(j)];
        deg = std::max(deg, e[0] + e[1] + e[2]);
      }
    }
  }
  return deg;
}

std::vector<DenseMatrix> PolySet::tabulate(const Eigen::MatrixX3d& points) const {
  const DenseMatrix t = monomial_table(vars_, degree_, points);
  std::vector<DenseMatrix> out;
  out.reserve(static_cast<std::size_t>(ncomp_));
  for (int c = 0; c < ncomp_; ++c) out.emplace_back(t * component(c).transpose());
  return out;
}

Eigen::VectorXd PolySet::evaluate(Eigen::Index i, const Eigen::Vector3d& p) const {
  Eigen::MatrixX3d pt(1, 3);
  pt.row(0) = p.transpose();
  const DenseMatrix t = monomial_table(vars_, degree_, pt);
  Eigen::VectorXd v(ncomp_);
  for (int c = 0; c < ncomp_; ++c) v(c) = t.row(0).dot(component(c).row(i));
  return v;
}

PolySet& PolySet::operator+=(const PolySet& other) {
  check_compatible(*this, other);
  if (other.size() != size()) throw DimensionMismatch("adding sets of different size");
  const int d = std::max(degree_, other.degree_);
  if (d > degree_) *this = raised(d);
  const PolySet o = other.raised(d);
  coef_ += o.coef_;
  return *this;
}

PolySet& PolySet::operator*=(double s) {
  coef_ *= s;
  return *this;
}

PolySet operator+(PolySet a, const PolySet& b) { return a += b; }
PolySet operator-(PolySet a, const PolySet& b) {
  PolySet nb = b;
  nb *= -1.0;
  return a += nb;
}
PolySet operator*(double s, PolySet a) { return a *= s; }

PolySet stack(const PolySet& a, const PolySet& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  check_compatible(a, b);
  const int d = std::max(a.degree(), b.degree());
  const PolySet ra = a.raised(d), rb = b.raised(d);
  DenseMatrix c(ra.size() + rb.size(), ra.coef().cols());
  c << ra.coef(), rb.coef();
  return PolySet(a.vars(), a.ncomp(), d, std::move(c));
}

// ---------------------------------------------------------------- calculus --

PolySet partial(const PolySet& p, int k) {
  const auto& ex = frame_exponents(p.vars(), p.degree());
  PolySet out(p.vars(), p.ncomp(), p.degree(), p.size());
  for (std::size_t j = 0; j < ex.size(); ++j) {
    Exponent e = ex[j];
    const int power = e[static_cast<std::size_t>(k)];
    if (power == 0) continue;
    e[static_cast<std::size_t>(k)] -= 1;
    const int target = monomial_index(p.vars(), e);
    for (int c = 0; c < p.ncomp(); ++c)
      out.component(c).col(target) += power * p.component(c).col(static_cast<Eigen::Index>(j));
  }
  return out;
}

PolySet times_coordinate(const PolySet& p, int k) {
  const auto& ex = frame_exponents(p.vars(), p.degree());
  PolySet out(p.vars(), p.ncomp(), p.degree() + 1, p.size());
  for (std::size_t j = 0; j < ex.size(); ++j) {
    Exponent e = ex[j];
    e[static_cast<std::size_t>(k)] += 1;
    const int target = monomial_index(p.vars(), e);
    for (int c = 0; c < p.ncomp(); ++c)
      out.component(c).col(target) += p.component(c).col(static_cast<Eigen::Index>(j));
  }
  return out;
}

PolySet multiply_scalar(const PolySet& a, const PolySet& b) {
  if (a.vars() != b.vars()) throw DimensionMismatch("multiplying fields in different variables");
  if (b.ncomp() != 1 && a.ncomp() != 1) throw DimensionMismatch("one factor must be scalar");
  const PolySet& vecp = (a.ncomp() == 1) ? b : a;
  const PolySet& sca = (a.ncomp() == 1) ? a : b;
  const Eigen::Index n = std::max(a.size(), b.size());
  if (!(a.size() == b.size() || a.size() == 1 || b.size() == 1)) {
    throw DimensionMismatch("member counts differ");
  }
  const int vars = a.vars();
  const int d = a.degree() + b.degree();
  PolySet out(vars, vecp.ncomp(), d, n);
  const auto& es = frame_exponents(vars, sca.degree());
  const auto& ev = frame_exponents(vars, vecp.degree());
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (std::size_t j = 0; j < ev.size(); ++j) {
      const Exponent e{es[i][0] + ev[j][0], es[i][1] + ev[j][1], es[i][2] + ev[j][2]};
      const int target = monomial_index(vars, e);
      for (int c = 0; c < vecp.ncomp(); ++c) {
        for (Eigen::Index m = 0; m < n; ++m) {
          const double s = sca.component(0)(sca.size() == 1 ? 0 : m, static_cast<Eigen::Index>(i));
          if (s == 0.0) continue;
          out.component(c)(m, target) +=
              s * vecp.component(c)(vecp.size() == 1 ? 0 : m, static_cast<Eigen::Index>(j));
        }
      }
    }
  }
  return out;
}

namespace {

// Assemble a new set whose components are given by a callback over partials.
template <class F>
PolySet build(const PolySet& p, int ncomp_out, F&& fill) {
  PolySet out(p.vars(), ncomp_out, p.degree(), p.size());
  std::array<PolySet, 3> d;
  for (int k = 0; k < p.vars(); ++k) d[static_cast<std::size_t>(k)] = partial(p, k);
  fill(out, d);
  return out;
}

}  // namespace

PolySet grad(const PolySet& p) {
  if (p.ncomp() == 1) {
    return build(p, 3, [](PolySet& o, std::array<PolySet, 3>& d) {
      for (int k = 0; k < 3; ++k) o.component(k) = d[static_cast<std::size_t>(k)].component(0);
    });
  }
  if (p.ncomp() == 3) {
    return build(p, 9, [](PolySet& o, std::array<PolySet, 3>& d) {
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) o.component(3 * i + k) = d[static_cast<std::size_t>(k)].component(i);
    });
  }
  throw DimensionMismatch("grad needs a scalar or vector field");
}

PolySet curl(const PolySet& p) {
  if (p.ncomp() != 3 && p.ncomp() != 9) throw DimensionMismatch("curl needs vector or matrix fields");
  const int rows = p.ncomp() / 3;
  return build(p, p.ncomp(), [rows](PolySet& o, std::array<PolySet, 3>& d) {
    for (int r = 0; r < rows; ++r) {
      const int b = 3 * r;
      o.component(b + 0) = d[1].component(b + 2) - d[2].component(b + 1);
      o.component(b + 1) = d[2].component(b + 0) - d[0].component(b + 2);
      o.component(b + 2) = d[0].component(b + 1) - d[1].component(b + 0);
    }
  });
}

PolySet div(const PolySet& p) {
  if (p.ncomp() != 3 && p.ncomp() != 9) throw DimensionMismatch("div needs vector or matrix fields");
  const int rows = p.ncomp() / 3;
  return build(p, rows, [rows](PolySet& o, std::array<PolySet, 3>& d) {
    for (int r = 0; r < rows; ++r)
      o.component(r) = d[0].component(3 * r) + d[1].component(3 * r + 1) + d[2].component(3 * r + 2);
  });
}

PolySet map_components(const PolySet& p, const DenseMatrix& m) {
  if (m.cols() != p.ncomp()) throw DimensionMismatch("component map width");
  PolySet out(p.vars(), static_cast<int>(m.rows()), p.degree(), p.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (int c = 0; c < p.ncomp(); ++c)
      if (m(r, c) != 0.0) out.component(static_cast<int>(r)) += m(r, c) * p.component(c);
  return out;
}

PolySet sandwich(const Mat3& left, const PolySet& u, const Mat3& right) {
  if (u.ncomp() != 9) throw DimensionMismatch("sandwich needs matrix fields");
  // (L U R)_{ij} = sum_{kl} L_ik U_kl R_lj
  DenseMatrix m = DenseMatrix::Zero(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) m(3 * i + j, 3 * k + l) = left(i, k) * right(l, j);
  return map_components(u, m);
}

PolySet s1_field(const PolySet& w) {
  if (w.ncomp() != 9) throw DimensionMismatch("S1 needs matrix fields");
  DenseMatrix m = DenseMatrix::Zero(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(3 * i + j, 3 * j + i) += 1.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(3 * i + i, 3 * k + k) -= 1.0;
  return map_components(w, m);
}

PolySet s2_field(const PolySet& u) {
  if (u.ncomp() != 9) throw DimensionMismatch("S2 needs matrix fields");
  DenseMatrix m = DenseMatrix::Zero(3, 9);
  m(0, 3 * 1 + 2) = 1.0;
  m(0, 3 * 2 + 1) = -1.0;
  m(1, 3 * 2 + 0) = 1.0;
  m(1, 3 * 0 + 2) = -1.0;
  m(2, 3 * 0 + 1) = 1.0;
  m(2, 3 * 1 + 0) = -1.0;
  return map_components(u, m);
}

PolySet as_matrix_row(const PolySet& v, int row) {
  if (v.ncomp() != 3) throw DimensionMismatch("as_matrix_row needs vector fields");
  DenseMatrix m = DenseMatrix::Zero(9, 3);
  for (int j = 0; j < 3; ++j) m(3 * row + j, j) = 1.0;
  return map_components(v, m);
}

PolySet restrict_affine(const PolySet& p, const Eigen::Vector3d& origin, const Eigen::Matrix3Xd& dirs) {
  const int nv = static_cast<int>(dirs.cols());
  // Linear forms x_k = origin_k + sum_j dirs(k, j) y_j as fields in nv variables.
  std::array<PolySet, 3> xk;
  for (int k = 0; k < 3; ++k) {
    PolySet f(nv, 1, 1, 1);
    f.coef()(0, 0) = origin(k);
    for (int j = 0; j < nv; ++j) {
      Exponent e{0, 0, 0};
      e[static_cast<std::size_t>(j)] = 1;
      f.coef()(0, monomial_index(nv, e)) = dirs(k, j);
    }
    xk[static_cast<std::size_t>(k)] = f;
  }
  // Powers of each linear form.
  std::array<std::vector<PolySet>, 3> pw;
  for (int k = 0; k < 3; ++k) {
    auto& v = pw[static_cast<std::size_t>(k)];
    PolySet one(nv, 1, 0, 1);
    one.coef()(0, 0) = 1.0;
    v.push_back(one);
    for (int d = 1; d <= p.degree(); ++d) v.push_back(multiply_scalar(v.back(), xk[static_cast<std::size_t>(k)]));
  }
  PolySet out(nv, p.ncomp(), p.degree(), p.size());
  const auto& ex = frame_exponents(p.vars(), p.degree());
  for (std::size_t j = 0; j < ex.size(); ++j) {
    PolySet mono = multiply_scalar(multiply_scalar(pw[0][static_cast<std::size_t>(ex[j][0])],
                                                   pw[1][static_cast<std::size_t>(ex[j][1])]),
                                   pw[2][static_cast<std::size_t>(ex[j][2])])
                       .raised(p.degree());
    for (int c = 0; c < p.ncomp(); ++c)
      out.component(c) += p.component(c).col(static_cast<Eigen::Index>(j)) * mono.coef().row(0);
  }
  return out;
}

PolySet compose_affine_inverse(const PolySet& p, const Mat3& a, const Vec3& b) {
  const Mat3 ainv = a.inverse();
  // x_hat = ainv x - ainv b.
  Eigen::Matrix3Xd dirs = ainv;
  return restrict_affine(p, -ainv * b, dirs);
}

DenseMatrix l2_gram(const PolySet& a, const PolySet& b) {
  check_compatible(a, b);
  const DenseMatrix m = monomial_gram(a.vars(), a.degree(), b.degree());
  DenseMatrix g = DenseMatrix::Zero(a.size(), b.size());
  for (int c = 0; c < a.ncomp(); ++c) g += a.component(c) * m * b.component(c).transpose();
  return g;
}

PolySet orthonormalize(const PolySet& p, double tol) {
  if (p.size() == 0) return p;
  // Factor the monomial Gram once: M = L L^T; then the inner products of the
  // fields are (C_c L)(C_c L)^T summed over components.
  const DenseMatrix m = monomial_gram(p.vars(), p.degree(), p.degree());
  Eigen::LLT<DenseMatrix> llt(m);
  const DenseMatrix l = llt.matrixL();
  const int n = p.frame();
  DenseMatrix scaled(p.size(), static_cast<Eigen::Index>(p.ncomp()) * n);
  for (int c = 0; c < p.ncomp(); ++c) scaled.middleCols(static_cast<Eigen::Index>(c) * n, n) = p.component(c) * l;
  Eigen::BDCSVD<DenseMatrix> svd(scaled, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  DenseMatrix u = svd.matrixU().leftCols(rank);
  // Deterministic sign: largest-magnitude entry of each column positive.
  for (Eigen::Index j = 0; j < rank; ++j) {
    Eigen::Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0) u.col(j) *= -1.0;
  }
  DenseMatrix w = s.head(rank).cwiseInverse().asDiagonal() * u.transpose();
  return p.combine(w);
}

}  // namespace afw3d
