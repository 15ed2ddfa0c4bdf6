#include <gtest/gtest.h>

#include <random>

#include "afw3d/errors.hpp"
#include "afw3d/tensor_ops.hpp"

using namespace afw3d;

namespace {

Mat3 random_mat(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = d(rng);
  return m;
}

Mat3 unit(int i, int j) {
  Mat3 m = Mat3::Zero();
  m(i, j) = 1.0;
  return m;
}

}  // namespace

TEST(VecOfAntisym, Pattern) {
  Mat3 k;
  k << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_EQ(vec_of_antisym(k), Vec3(1, 2, 3));
  EXPECT_EQ(vec_of_antisym(Mat3::Zero()), Vec3::Zero());
}

TEST(VecOfAntisym, InvertsSkewOfVec) {
  std::mt19937 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vec3 v = random_mat(rng).col(0);
    EXPECT_EQ(vec_of_antisym(skew_of_vec(v)), v);
  }
}

TEST(VecOfAntisym, RejectsSymmetricPart) { EXPECT_THROW(vec_of_antisym(unit(0, 1)), NotAntisymmetric); }

TEST(S2, SymmetricKernel) {
  std::mt19937 rng(2);
  const Mat3 u = random_mat(rng);
  EXPECT_LE(s2(u + u.transpose()).norm(), 1e-15);
}

TEST(S2, SkewInput) { EXPECT_EQ(s2(skew_of_vec(Vec3(1, 2, 3))), Vec3(-2, -4, -6)); }

TEST(S2, SingleEntry) { EXPECT_EQ(s2(unit(0, 1)), Vec3(0, 0, 1)); }

TEST(S1, Examples) {
  EXPECT_EQ(s1(Mat3::Identity()), Mat3(-2.0 * Mat3::Identity()));
  Mat3 w;
  w << 1, 2, 3, 2, -4, 5, 3, 5, 3;
  EXPECT_EQ(s1(w), w);
  EXPECT_EQ(s1(unit(0, 1)), unit(1, 0));
}

TEST(S1Inv, Examples) {
  EXPECT_EQ(s1_inv(Mat3(-2.0 * Mat3::Identity())), Mat3::Identity());
  const Mat3 d = Vec3(2, 0, 0).asDiagonal();
  EXPECT_EQ(s1_inv(d), Mat3(Vec3(1, -1, -1).asDiagonal()));
}

TEST(S1Inv, RoundTrip) {
  std::mt19937 rng(3);
  for (int k = 0; k < 100; ++k) {
    const Mat3 w = random_mat(rng);
    EXPECT_LE((s1_inv(s1(w)) - w).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((s1(s1_inv(w)) - w).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Compliance, IdentityMaterial) {
  const Material m(0.0, 0.5);
  EXPECT_LE((compliance_apply(m, Mat3::Identity()) - Mat3::Identity()).norm(), 1e-15);
}

TEST(Compliance, SkewScaledByShearModulus) {
  const Material m(2.0, 3.0);
  const Mat3 k = skew_of_vec(Vec3(0.3, -1.0, 2.0));
  EXPECT_LE((compliance_apply(m, k) - k / 6.0).norm(), 1e-15);
}

TEST(Compliance, InvertsHooke) {
  std::mt19937 rng(4);
  const Material m(1.7, 0.8);
  for (int k = 0; k < 20; ++k) {
    const Mat3 g = random_mat(rng);
    const Mat3 eps = 0.5 * (g + g.transpose());
    const Mat3 sigma = 2.0 * m.mu() * eps + m.lambda() * eps.trace() * Mat3::Identity();
    EXPECT_LE((compliance_apply(m, sigma) - eps).norm(), 1e-14);
    EXPECT_LE((stiffness_apply(m, eps) - sigma).norm(), 1e-14);
  }
}

TEST(Compliance, LowerBound) {
  EXPECT_DOUBLE_EQ(Material(1.0, 1.0).compliance_lower_bound(), 0.2);
  EXPECT_DOUBLE_EQ(Material(-0.5, 1.0).compliance_lower_bound(), 0.5);
}

TEST(Material, RejectsInvalid) {
  EXPECT_THROW(Material(1.0, 0.0), InvalidMaterial);
  EXPECT_THROW(Material(-1.0, 1.0), InvalidMaterial);
}
