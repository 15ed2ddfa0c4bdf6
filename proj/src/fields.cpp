#include "afw3d/fields.hpp"

#include "afw3d/errors.hpp"

namespace afw3d {

namespace {

DenseMatrix s1_component_map() {
  DenseMatrix m = DenseMatrix::Zero(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(3 * i + j, 3 * j + i) += 1.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(3 * i + i, 3 * k + k) -= 1.0;
  return m;
}

}  // namespace

FieldSample::FieldSample(int ncomp, ValueFn value, GradFn gradient)
    : ncomp_(ncomp), value_(std::move(value)), gradient_(std::move(gradient)) {}

FieldSample FieldSample::smooth(int ncomp, std::function<Eigen::VectorXd(const Vec3&)> value,
                                std::function<DenseMatrix(const Vec3&)> gradient) {
  GradFn g;
  if (gradient) g = [gradient](int, const Vec3& x) { return gradient(x); };
  return FieldSample(ncomp, [value](int, const Vec3& x) { return value(x); }, g);
}

FieldSample FieldSample::smooth_matrix(std::function<Mat3(const Vec3&)> value) {
  return smooth(9, [value](const Vec3& x) {
    const Mat3 m = value(x);
    Eigen::VectorXd v(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v(3 * i + j) = m(i, j);
    return v;
  });
}

FieldSample FieldSample::polynomial(const PolySet& p) {
  auto poly = std::make_shared<const PolySet>(p.member(0));
  auto grads = std::make_shared<const std::array<PolySet, 3>>(
      std::array<PolySet, 3>{partial(*poly, 0), partial(*poly, 1), partial(*poly, 2)});
  const int nc = p.ncomp();
  return FieldSample(
      nc, [poly](int, const Vec3& x) { return poly->evaluate(0, x); },
      [grads, nc](int, const Vec3& x) {
        DenseMatrix g(nc, 3);
        for (int k = 0; k < 3; ++k) g.col(k) = (*grads)[static_cast<std::size_t>(k)].evaluate(0, x);
        return g;
      });
}

FieldSample FieldSample::piecewise(const SimplicialMesh& mesh, std::vector<PolySet> local) {
  if (static_cast<int>(local.size()) != mesh.num_tets()) throw DimensionMismatch("one polynomial per tet expected");
  auto polys = std::make_shared<const std::vector<PolySet>>(std::move(local));
  std::vector<AffineMap> maps;
  maps.reserve(polys->size());
  for (int t = 0; t < mesh.num_tets(); ++t) maps.push_back(mesh.affine(t));
  auto am = std::make_shared<const std::vector<AffineMap>>(std::move(maps));
  auto grads = std::make_shared<std::vector<PolySet>>();
  for (std::size_t t = 0; t < polys->size(); ++t) grads->push_back(physical_gradient((*polys)[t], (*am)[t]));
  const int nc = polys->empty() ? 0 : (*polys)[0].ncomp();
  FieldSample f(
      nc,
      [polys, am](int t, const Vec3& x) {
        return (*polys)[static_cast<std::size_t>(t)].evaluate(0, (*am)[static_cast<std::size_t>(t)].pull(x));
      },
      [grads, am, nc](int t, const Vec3& x) {
        const Eigen::VectorXd g = (*grads)[static_cast<std::size_t>(t)].evaluate(0, (*am)[static_cast<std::size_t>(t)].pull(x));
        DenseMatrix out(nc, 3);
        for (int c = 0; c < nc; ++c)
          for (int k = 0; k < 3; ++k) out(c, k) = g(3 * c + k);
        return out;
      });
  f.local_ = polys;
  return f;
}

Eigen::VectorXd FieldSample::value(int tet, const Vec3& x) const { return value_(tet, x); }

DenseMatrix FieldSample::gradient(int tet, const Vec3& x) const {
  if (!gradient_) throw DimensionMismatch("field has no gradient");
  return gradient_(tet, x);
}

DenseMatrix FieldSample::values(int tet, const Eigen::MatrixX3d& physical, const Eigen::MatrixX3d& reference) const {
  if (local_) {
    const auto tab = (*local_)[static_cast<std::size_t>(tet)].tabulate(reference);
    DenseMatrix out(reference.rows(), ncomp_);
    for (int c = 0; c < ncomp_; ++c) out.col(c) = tab[static_cast<std::size_t>(c)].col(0);
    return out;
  }
  DenseMatrix out(physical.rows(), ncomp_);
  for (Eigen::Index q = 0; q < physical.rows(); ++q) out.row(q) = value_(tet, physical.row(q).transpose()).transpose();
  return out;
}

FieldSample FieldSample::mapped(const DenseMatrix& m) const {
  if (m.cols() != ncomp_) throw DimensionMismatch("component map width");
  auto self = std::make_shared<const FieldSample>(*this);
  GradFn g;
  if (gradient_) g = [self, m](int t, const Vec3& x) { return DenseMatrix(m * self->gradient(t, x)); };
  FieldSample out(static_cast<int>(m.rows()), [self, m](int t, const Vec3& x) { return Eigen::VectorXd(m * self->value(t, x)); }, g);
  if (local_) {
    auto mapped_local = std::make_shared<std::vector<PolySet>>();
    for (const auto& p : *local_) mapped_local->push_back(map_components(p, m));
    out.local_ = mapped_local;
  }
  return out;
}

FieldSample FieldSample::divergence() const {
  if (ncomp_ != 3 && ncomp_ != 9) throw DimensionMismatch("divergence needs vector or matrix fields");
  if (!gradient_) throw DimensionMismatch("divergence needs the gradient");
  auto self = std::make_shared<const FieldSample>(*this);
  const int rows = ncomp_ / 3;
  return FieldSample(rows, [self, rows](int t, const Vec3& x) {
    const DenseMatrix g = self->gradient(t, x);
    Eigen::VectorXd d(rows);
    for (int r = 0; r < rows; ++r) d(r) = g(3 * r, 0) + g(3 * r + 1, 1) + g(3 * r + 2, 2);
    return d;
  });
}

FieldSample FieldSample::operator-(const FieldSample& other) const {
  DenseMatrix m(ncomp_, 2 * ncomp_);
  m << DenseMatrix::Identity(ncomp_, ncomp_), -DenseMatrix::Identity(ncomp_, ncomp_);
  auto a = std::make_shared<const FieldSample>(*this);
  auto b = std::make_shared<const FieldSample>(other);
  if (other.ncomp_ != ncomp_) throw DimensionMismatch("field difference of unequal shapes");
  GradFn g;
  if (gradient_ && other.gradient_) g = [a, b](int t, const Vec3& x) { return DenseMatrix(a->gradient(t, x) - b->gradient(t, x)); };
  FieldSample out(ncomp_, [a, b](int t, const Vec3& x) { return Eigen::VectorXd(a->value(t, x) - b->value(t, x)); }, g);
  if (local_ && other.local_) {
    auto loc = std::make_shared<std::vector<PolySet>>();
    for (std::size_t t = 0; t < local_->size(); ++t) loc->push_back((*local_)[t] - (*other.local_)[t]);
    out.local_ = loc;
  }
  return out;
}

FieldSample FieldSample::operator+(const FieldSample& other) const {
  if (other.ncomp_ != ncomp_) throw DimensionMismatch("field sum of unequal shapes");
  auto a = std::make_shared<const FieldSample>(*this);
  auto b = std::make_shared<const FieldSample>(other);
  GradFn g;
  if (gradient_ && other.gradient_) g = [a, b](int t, const Vec3& x) { return DenseMatrix(a->gradient(t, x) + b->gradient(t, x)); };
  FieldSample out(ncomp_, [a, b](int t, const Vec3& x) { return Eigen::VectorXd(a->value(t, x) + b->value(t, x)); }, g);
  if (local_ && other.local_) {
    auto loc = std::make_shared<std::vector<PolySet>>();
    for (std::size_t t = 0; t < local_->size(); ++t) loc->push_back((*local_)[t] + (*other.local_)[t]);
    out.local_ = loc;
  }
  return out;
}

PolySet physical_gradient(const PolySet& p, const AffineMap& am) {
  // d/dx_k = sum_m (A^{-1})_{mk} d/dx̂_m
  std::array<PolySet, 3> d{partial(p, 0), partial(p, 1), partial(p, 2)};
  PolySet out(p.vars(), 3 * p.ncomp(), p.degree(), p.size());
  for (int c = 0; c < p.ncomp(); ++c)
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m)
        out.component(3 * c + k) += am.ainv(m, k) * d[static_cast<std::size_t>(m)].component(c);
  return out;
}

PolySet physical_divergence(const PolySet& p, const AffineMap& am) {
  if (p.ncomp() != 3 && p.ncomp() != 9) throw DimensionMismatch("divergence needs vector or matrix fields");
  const PolySet g = physical_gradient(p, am);
  const int rows = p.ncomp() / 3;
  DenseMatrix m = DenseMatrix::Zero(rows, g.ncomp());
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k < 3; ++k) m(r, 3 * (3 * r + k) + k) = 1.0;
  return map_components(g, m);
}

FieldSample s1_of(const FieldSample& w) {
  if (w.ncomp() != 9) throw DimensionMismatch("S1 needs matrix fields");
  return w.mapped(s1_component_map());
}

}  // namespace afw3d
