#pragma once

// 3x3 matrix algebra: the vec identification of skew matrices, the algebraic
// operators S1 and S2, and the isotropic compliance tensor.

#include <Eigen/Dense>

namespace afw3d {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Isotropic material given by its Lamé constants.
class Material {
 public:
  /// Throws InvalidMaterial unless mu > 0 and 3 lambda + 2 mu > 0.
  Material(double lame_lambda, double lame_mu);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Smallest eigenvalue of the compliance operator on all of M:
  /// min(1 / (2 mu), 1 / (2 mu + 3 lambda)).
  double compliance_lower_bound() const;

 private:
  double lambda_;
  double mu_;
};

/// Skew matrix whose vec is v:
///   [ 0  -v3  v2 ]
///   [ v3  0  -v1 ]
///   [-v2  v1  0  ]
Mat3 skew_of_vec(const Vec3& v);

/// Inverse of skew_of_vec. Throws NotAntisymmetric if K + K^T exceeds tol.
Vec3 vec_of_antisym(const Mat3& k, double tol = 1e-12);

/// S2 U = (u23 - u32, u31 - u13, u12 - u21).
Vec3 s2(const Mat3& u);

/// S1 W = W^T - tr(W) I.
Mat3 s1(const Mat3& w);

/// S1^{-1} W = W^T - tr(W) I / 2.
Mat3 s1_inv(const Mat3& w);

/// Compliance A sigma. The symmetric part follows the isotropic Hooke law
/// inverse; the skew part is scaled by 1 / (2 mu).
Mat3 compliance_apply(const Material& m, const Mat3& sigma);

/// Hooke's law on a symmetric strain: 2 mu eps + lambda tr(eps) I.
Mat3 stiffness_apply(const Material& m, const Mat3& eps);

/// Frobenius product A : B.
inline double frobenius(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

}  // namespace afw3d
