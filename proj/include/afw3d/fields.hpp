#pragma once

// Fields sampled by the interpolation operators and error evaluators.
//
// A FieldSample has 1, 3 or 9 components (scalar, vector, matrix with entry
// (i, j) at 3 i + j) and is evaluated per tet so piecewise fields are
// supported. Gradients, when present, are ncomp x 3 with (c, k) = d_k comp c.

#include <functional>
#include <memory>
#include <vector>

#include "afw3d/mesh.hpp"
#include "afw3d/polynomial.hpp"

namespace afw3d {

class FieldSample {
 public:
  using ValueFn = std::function<Eigen::VectorXd(int tet, const Vec3& x)>;
  using GradFn = std::function<DenseMatrix(int tet, const Vec3& x)>;

  FieldSample() = default;
  FieldSample(int ncomp, ValueFn value, GradFn gradient = {});

  /// Field defined on all of R^3.
  static FieldSample smooth(int ncomp, std::function<Eigen::VectorXd(const Vec3&)> value,
                            std::function<DenseMatrix(const Vec3&)> gradient = {});
  static FieldSample smooth_matrix(std::function<Mat3(const Vec3&)> value);
  /// Global polynomial in physical coordinates (single member of p).
  static FieldSample polynomial(const PolySet& p);
  /// Per-tet polynomials in the reference coordinates of each tet, with
  /// physical component values.
  static FieldSample piecewise(const SimplicialMesh& mesh, std::vector<PolySet> local);

  int ncomp() const { return ncomp_; }
  bool has_gradient() const { return static_cast<bool>(gradient_); }

  Eigen::VectorXd value(int tet, const Vec3& x) const;
  DenseMatrix gradient(int tet, const Vec3& x) const;

  /// Values at points of one tet given in physical and reference coordinates
  /// (npoints x ncomp).
  DenseMatrix values(int tet, const Eigen::MatrixX3d& physical, const Eigen::MatrixX3d& reference) const;

  /// Pointwise linear map of the components: result = m * value.
  FieldSample mapped(const DenseMatrix& m) const;
  /// Divergence (row-wise for matrices); needs the gradient.
  FieldSample divergence() const;
  FieldSample operator-(const FieldSample& other) const;
  FieldSample operator+(const FieldSample& other) const;

  /// Local polynomials when the field is piecewise polynomial.
  const std::vector<PolySet>* local_polynomials() const { return local_.get(); }

 private:
  int ncomp_ = 0;
  ValueFn value_;
  GradFn gradient_;
  std::shared_ptr<const std::vector<PolySet>> local_;
};

/// Physical-coordinate gradient of a reference-coordinate local polynomial:
/// result has 3 ncomp components, (c, k) at 3 c + k.
PolySet physical_gradient(const PolySet& p, const AffineMap& am);
/// Physical divergence of a local vector or matrix polynomial.
PolySet physical_divergence(const PolySet& p, const AffineMap& am);

/// S1 applied pointwise to matrix fields.
FieldSample s1_of(const FieldSample& w);

}  // namespace afw3d
