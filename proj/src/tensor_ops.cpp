#include "afw3d/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afw3d/errors.hpp"

namespace afw3d {

Material::Material(double lame_lambda, double lame_mu) : lambda_(lame_lambda), mu_(lame_mu) {
  if (!(mu_ > 0.0) || !(3.0 * lambda_ + 2.0 * mu_ > 0.0) || !std::isfinite(lambda_) ||
      !std::isfinite(mu_)) {
    throw InvalidMaterial("need mu > 0 and 3 lambda + 2 mu > 0, got lambda = " +
                          std::to_string(lambda_) + ", mu = " + std::to_string(mu_));
  }
}

double Material::compliance_lower_bound() const {
  return std::min(1.0 / (2.0 * mu_), 1.0 / (2.0 * mu_ + 3.0 * lambda_));
}

Mat3 skew_of_vec(const Vec3& v) {
  Mat3 k;
  k << 0.0, -v(2), v(1),
       v(2), 0.0, -v(0),
       -v(1), v(0), 0.0;
  return k;
}

Vec3 vec_of_antisym(const Mat3& k, double tol) {
  const double asym = (k + k.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    throw NotAntisymmetric("|K + K^T|_max = " + std::to_string(asym));
  }
  return Vec3(k(2, 1), k(0, 2), k(1, 0));
}

Vec3 s2(const Mat3& u) {
  return Vec3(u(1, 2) - u(2, 1), u(2, 0) - u(0, 2), u(0, 1) - u(1, 0));
}

Mat3 s1(const Mat3& w) { return w.transpose() - w.trace() * Mat3::Identity(); }

Mat3 s1_inv(const Mat3& w) { return w.transpose() - 0.5 * w.trace() * Mat3::Identity(); }

Mat3 compliance_apply(const Material& m, const Mat3& sigma) {
  const Mat3 sym = 0.5 * (sigma + sigma.transpose());
  const Mat3 skw = 0.5 * (sigma - sigma.transpose());
  const double two_mu = 2.0 * m.mu();
  const double c = m.lambda() / (two_mu + 3.0 * m.lambda());
  return (sym - c * sym.trace() * Mat3::Identity()) / two_mu + skw / two_mu;
}

Mat3 stiffness_apply(const Material& m, const Mat3& eps) {
  return 2.0 * m.mu() * eps + m.lambda() * eps.trace() * Mat3::Identity();
}

}  // namespace afw3d
