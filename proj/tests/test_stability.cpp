#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "afw3d/errors.hpp"
#include "afw3d/stability.hpp"

using namespace afw3d;

namespace {

FieldSample zero_vector() {
  return FieldSample::smooth(3, [](const Vec3&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(3)); });
}

double dense_beta(const BlockSaddleSystem& s) {
  DenseMatrix b(s.dofs.displacement + s.dofs.rotation, s.dofs.stress());
  b << DenseMatrix(s.b1), DenseMatrix(s.b2);
  const DenseMatrix m(s.hdiv_gram());
  const DenseMatrix schur = b * m.ldlt().solve(b.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(schur);
  return std::sqrt(es.eigenvalues()(0));
}

Vector random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(InfSup, SingleTetMatchesDenseOracle) {
  const SimplicialMesh m = build_complex({Vec3(0, 0, 0), Vec3(1, 0.1, 0), Vec3(0.2, 1, 0), Vec3(0.1, 0.3, 0.9)}, {{0, 1, 2, 3}});
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 0), Material(1.0, 1.0), zero_vector());
  const InfSup is = infsup_constant(s);
  EXPECT_GT(is.beta, 1e-6);
  EXPECT_NEAR(is.beta, dense_beta(s), 1e-7);
}

TEST(InfSup, LowestOrderUniformAcrossTwoLevels) {
  std::vector<double> beta;
  for (int n : {1, 2}) beta.push_back(infsup_constant(unit_cube_mesh(n), uniform_order(unit_cube_mesh(n), 0)).beta);
  EXPECT_LE(relative_drift(beta), 0.2);
}

TEST(InfSup, MixedOrdersPositive) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const OrderMap r = random_policy(0, 1, 42)(m);
  const BlockSaddleSystem s = assemble(m, r, Material(1.0, 1.0), zero_vector());
  const double beta = infsup_constant(s).beta;
  EXPECT_GT(beta, 1e-6);
  EXPECT_NEAR(beta, dense_beta(s), 1e-7);
}

TEST(KernelCoercivity, AboveComplianceBound) {
  const SimplicialMesh m = unit_cube_mesh(1);
  for (double lambda : {1.0, 1e2, 1e4}) {
    const KernelCoercivity kc = kernel_coercivity(m, uniform_order(m, 0), Material(lambda, 1.0));
    EXPECT_GE(kc.ratio, Material(lambda, 1.0).compliance_lower_bound() - 1e-9) << lambda;
    EXPECT_GT(kc.kernel_dim, 0);
    EXPECT_LE(kc.max_div, 1e-10);
  }
}

TEST(Diagrams, ResidualsOnVariableOrders) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const DiagramTable t = commuting_diagram_suite(m, random_policy(0, 2, 11)(m), 3, 11);
  EXPECT_EQ(t.rows.size(), 3u * 6u);
  EXPECT_LE(t.max_residual(1), 1e-9);
  EXPECT_LE(t.max_residual(2), 1e-9);
  EXPECT_LE(t.max_residual(3), 1e-8);
}

TEST(Construction, ZeroDataGivesZeroStress) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 0), Material(1.0, 1.0), zero_vector());
  const ConstructionCheck c =
      stability_construction_check(s, Vector::Zero(s.dofs.rotation), Vector::Zero(s.dofs.displacement));
  EXPECT_LE(c.sigma.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Construction, RandomDataFeasibleAcrossLevels) {
  std::vector<double> ratio;
  for (int n : {1, 2}) {
    const SimplicialMesh m = unit_cube_mesh(n);
    const BlockSaddleSystem s = assemble(m, uniform_order(m, 0), Material(1.0, 1.0), zero_vector());
    const ConstructionCheck c = stability_construction_check(s, random_vector(s.dofs.rotation, 1), random_vector(s.dofs.displacement, 2));
    EXPECT_TRUE(std::isfinite(c.ratio));
    EXPECT_LE(c.constraint_residual, 1e-9);
    ratio.push_back(c.ratio);
  }
  EXPECT_LE(relative_drift(ratio), 0.25);
}

TEST(Construction, RejectsWrongSizes) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 0), Material(1.0, 1.0), zero_vector());
  EXPECT_THROW(stability_construction_check(s, Vector::Zero(1), Vector::Zero(s.dofs.displacement)), DimensionMismatch);
}

TEST(Convergence, ErrorsDecreaseAndQuasiOptimalityAtLeastOne) {
  const ConvergenceReport rep = convergence_study(sine_bubble(Material(1.0, 1.0)), uniform_policy(0), cube_sequence({1, 2}));
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_GT(rep.rows[1].rate_total, 0.0);
  for (const auto& row : rep.rows) {
    EXPECT_GE(row.quasi_optimality, 1.0 - 1e-12);
    EXPECT_LT(row.quasi_optimality, 2.0);
  }
  EXPECT_EQ(rep.rows[0].rate_total, 0.0);
  EXPECT_NEAR(rep.rows[1].h, 0.5 * rep.rows[0].h, 1e-15);
}

TEST(Policies, RandomIsSeeded) {
  EXPECT_EQ(random_orders(20, 0, 3, 5), random_orders(20, 0, 3, 5));
  EXPECT_NE(random_orders(20, 0, 3, 5), random_orders(20, 0, 3, 6));
  for (int o : random_orders(50, 1, 2, 7)) {
    EXPECT_GE(o, 1);
    EXPECT_LE(o, 2);
  }
}

TEST(Policies, ListInheritsUnderRefinement) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const OrderPolicy p = list_policy({0, 1, 2, 0, 1, 2});
  const OrderMap fine = p(refine_uniform(m));
  for (int t = 0; t < 48; ++t) EXPECT_EQ(fine.tet[static_cast<std::size_t>(t)], (t / 8) % 3);
  const SimplicialMesh tet = build_complex({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2, 3}});
  EXPECT_THROW(p(tet), ConfigError);
}

TEST(Drift, Definition) {
  EXPECT_DOUBLE_EQ(relative_drift({1.0, 0.8, 0.9}), 0.2);
  EXPECT_DOUBLE_EQ(relative_drift({}), 0.0);
}

TEST(RandomFields, DeterministicAndConsistentGradient) {
  const FieldSample a = random_polynomial_field(9, 3, 4);
  const FieldSample b = random_polynomial_field(9, 3, 4);
  const Vec3 x(0.3, 0.1, 0.7);
  EXPECT_EQ(a.value(0, x), b.value(0, x));
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = Vec3::Unit(k) * h;
    const Eigen::VectorXd fd = (a.value(0, x + e) - a.value(0, x - e)) / (2 * h);
    EXPECT_LE((fd - a.gradient(0, x).col(k)).cwiseAbs().maxCoeff(), 1e-7);
  }
  for (int i = 0; i < 3; ++i) {
    const FieldSample t = transcendental_field(i);
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = Vec3::Unit(k) * h;
      const Eigen::VectorXd fd = (t.value(0, x + e) - t.value(0, x - e)) / (2 * h);
      EXPECT_LE((fd - t.gradient(0, x).col(k)).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}
