#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "afw3d/assembly.hpp"
#include "afw3d/errors.hpp"
#include "afw3d/quadrature.hpp"
#include "afw3d/stability.hpp"

using namespace afw3d;

namespace {

SimplicialMesh skewed_tet() {
  return build_complex({Vec3(0.1, 0.0, 0.2), Vec3(1.2, 0.1, 0.2), Vec3(0.2, 0.9, 0.3), Vec3(0.0, 0.2, 1.3)}, {{0, 1, 2, 3}});
}

FieldSample zero_vector() {
  return FieldSample::smooth(3, [](const Vec3&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(3)); });
}

FieldSample constant_vector(const Vec3& v) {
  return FieldSample::smooth(3, [v](const Vec3&) { return Eigen::VectorXd(v); });
}

double eps(int a, int i, int j) {
  if (a == i || i == j || a == j) return 0.0;
  return ((i - a + 3) % 3 == 1) ? 1.0 : -1.0;
}

}  // namespace

TEST(DofMap, SingleTetLowestOrder) {
  const SimplicialMesh m = skewed_tet();
  const DofMap d = build_dof_map(m, uniform_order(m, 0));
  EXPECT_EQ(d.stress(), 3 * 12);
  EXPECT_EQ(d.displacement, 3);
  EXPECT_EQ(d.rotation, 3);
  for (int f = 0; f < 4; ++f) EXPECT_EQ(d.face_count[static_cast<std::size_t>(f)], 3);
  EXPECT_EQ(d.interior_count[0], 0);
}

TEST(DofMap, SharedFaceCountedOnce) {
  const SimplicialMesh m = build_complex({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 1, 1)},
                                         {{0, 1, 2, 3}, {1, 2, 3, 4}});
  const DofMap d = build_dof_map(m, uniform_order(m, 0));
  EXPECT_EQ(d.scalar_stress, 2 * 12 - 3);
  const DofMap d2 = build_dof_map(m, uniform_order(m, 2));
  EXPECT_EQ(d2.scalar_stress, 2 * basis_full(SpaceTag::P_L2, 3).size() - 10);
}

TEST(DofMap, VariableOrderIsSubspace) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const DofMap var = build_dof_map(m, random_policy(0, 2, 5)(m));
  const DofMap uni = build_dof_map(m, uniform_order(m, 2));
  EXPECT_LE(var.total(), uni.total());
}

TEST(DofMap, RejectsNonMonotoneOrders) {
  const SimplicialMesh m = unit_cube_mesh(1);
  OrderMap r = uniform_order(m, 0);
  r.face[0] = 1;
  EXPECT_THROW(build_dof_map(m, r), NonMonotoneOrder);
}

TEST(Assemble, ComplianceBlockPositiveDefinite) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 0), Material(1.0, 1.0), zero_vector());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es{DenseMatrix(s.a)};
  EXPECT_GT(es.eigenvalues()(0), 0.0);
}

TEST(Assemble, RotationBlockVanishesOnSymmetricStress) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 1), Material(1.0, 1.0), zero_vector());
  const Mat3 sym = (Mat3() << 1, 2, 3, 2, -1, 0.5, 3, 0.5, 2).finished();
  const FieldSample sig = FieldSample::smooth_matrix([sym](const Vec3& x) { return Mat3(sym * (1.0 + x(0) - 2.0 * x(2))); });
  const FieldSample dsig = FieldSample::smooth(3, [sym](const Vec3&) { return Eigen::VectorXd(Vec3(sym.col(0) - 2.0 * sym.col(2))); });
  const Vector coef = hdiv_projection(m, s, sig, dsig);
  EXPECT_LE((s.b2 * coef).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assemble, DivDivIsProductOfDivergenceBlocks) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const BlockSaddleSystem s = assemble(m, random_policy(0, 2, 9)(m), Material(1.0, 1.0), zero_vector());
  const DenseMatrix b1(s.b1);
  const DenseMatrix dd(s.divdiv);
  EXPECT_LE((b1.transpose() * b1 - dd).cwiseAbs().maxCoeff(), 1e-12 * dd.cwiseAbs().maxCoeff());
}

TEST(Assemble, ConstantFieldsFirstEquationResidual) {
  const SimplicialMesh m = skewed_tet();
  const Material mat(2.0, 0.7);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 1), mat, zero_vector());
  const Mat3 sg = (Mat3() << 1.0, 0.4, -0.2, 0.3, 2.0, 0.1, -0.5, 0.6, 1.5).finished();
  const Vec3 uc(0.3, -1.2, 0.8), pc(-0.7, 0.2, 1.1);

  const Vector sv = hdiv_projection(m, s, FieldSample::smooth_matrix([sg](const Vec3&) { return sg; }), zero_vector());
  const Vector uv = field_projection(m, s, constant_vector(uc));
  const Vector pv = field_projection(m, s, constant_vector(pc));
  const Vector residual = s.a * sv + DenseMatrix(s.b1).transpose() * uv + DenseMatrix(s.b2).transpose() * pv;

  // Hand integration: interior integrals of psi and boundary fluxes.
  const ElementBasis& eb = s.elements[0];
  const AffineMap& am = m.affine(0);
  const QuadRule& q = rule_for(3, 8);
  const auto psi = eb.psi.tabulate(q.points);
  const Eigen::Index n = eb.psi.size();
  DenseMatrix integral(n, 3);
  for (int j = 0; j < 3; ++j) integral.col(j) = std::abs(am.det) * psi[static_cast<std::size_t>(j)].transpose() * q.weights;
  Vector flux = Vector::Zero(n);
  const QuadRule& fq = rule_for(2, 8);
  for (int f = 0; f < 4; ++f) {
    const auto& fv = face_vertices(f);
    const Vec3 a = reference_vertex(fv[0]), b = reference_vertex(fv[1]), c = reference_vertex(fv[2]);
    Eigen::MatrixX3d pts(fq.size(), 3);
    for (Eigen::Index i = 0; i < fq.size(); ++i) pts.row(i) = (a + fq.points(i, 0) * (b - a) + fq.points(i, 1) * (c - a)).transpose();
    const Vec3 pa = am.map(a), pb = am.map(b), pc2 = am.map(c), opp = am.map(reference_vertex(f));
    Vec3 nrm = (pb - pa).cross(pc2 - pa);
    const double area2 = nrm.norm();
    nrm /= area2;
    if (nrm.dot(opp - pa) > 0) nrm = -nrm;
    const auto ft = eb.psi.tabulate(pts);
    flux += area2 * (nrm(0) * ft[0] + nrm(1) * ft[1] + nrm(2) * ft[2]).transpose() * fq.weights;
  }
  const Mat3 as = compliance_apply(mat, sg);
  const int ns = s.dofs.scalar_stress;
  double err = 0.0;
  for (int i = 0; i < 3; ++i)
    for (Eigen::Index k = 0; k < n; ++k) {
      double want = as.row(i).dot(integral.row(k)) + uc(i) * flux(k);
      for (int a = 0; a < 3; ++a)
        for (int j = 0; j < 3; ++j) want -= eps(a, i, j) * pc(a) * integral(k, j);
      err = std::max(err, std::abs(residual(i * ns + s.dofs.stress_local[0][static_cast<std::size_t>(k)]) - want));
    }
  EXPECT_LE(err, 1e-12);
}

TEST(Solve, ZeroLoadGivesZeroSolution) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 1), Material(1.0, 1.0), zero_vector());
  const SaddleSolution sol = solve_saddle(m, s);
  EXPECT_LE(sol.sigma.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(sol.u.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(sol.p.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Solve, PatchTestReproducesConstantStress) {
  const Mat3 sg = (Mat3() << 1.0, 0.2, 0.3, 0.2, 2.0, 0.4, 0.3, 0.4, 3.0).finished();
  const ManufacturedCase c = constant_stress(Material(1.5, 0.6), sg);
  const SimplicialMesh m = unit_cube_mesh(1);
  for (const OrderMap& r : {uniform_order(m, 0), uniform_order(m, 2), random_policy(0, 2, 3)(m)}) {
    const BlockSaddleSystem s = assemble(m, r, c);
    const SaddleSolution sol = solve_saddle(m, s);
    const ErrorNorms e = error_norms(m, s, sol.stress, sol.displacement, sol.rotation, c);
    EXPECT_LE(e.stress_l2, 1e-10);
    EXPECT_LE(e.stress_div, 1e-10);
    EXPECT_LE(e.rotation_l2, 1e-10);
  }
}

TEST(Solve, SineCaseErrorDecreases) {
  const ManufacturedCase c = sine_bubble(Material(1.0, 1.0));
  double prev = 1e300;
  for (int n : {1, 2}) {
    const SimplicialMesh m = unit_cube_mesh(n);
    const BlockSaddleSystem s = assemble(m, uniform_order(m, 1), c);
    const SaddleSolution sol = solve_saddle(m, s);
    const double e = error_norms(m, s, sol.stress, sol.displacement, sol.rotation, c).total();
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(ErrorNorms, ZeroSolutionGivesExactNorms) {
  const ManufacturedCase c = sine_bubble(Material(1.0, 1.0));
  const SimplicialMesh m = unit_cube_mesh(2);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 0), c);
  const DiscreteField zs = stress_field(s, Vector::Zero(s.dofs.stress()));
  const DiscreteField zu = elementwise_field(s, Vector::Zero(s.dofs.displacement), "P_r(V)");
  const ErrorNorms e = error_norms(m, s, zs, zu, zu, c);
  // u = sin(pi x) sin(pi y) sin(pi z) (1,1,1): ||u||^2 = 3 / 8.
  EXPECT_NEAR(e.displacement_l2, std::sqrt(3.0 / 8.0), 1e-8);
  const double k = 3.14159265358979323846;
  // p = vec of the skew part of grad u; each component is (d_a - d_b) u / 2 with
  // ||d_a u||^2 = pi^2 / 8 and cross terms vanishing.
  EXPECT_NEAR(e.rotation_l2, std::sqrt(3.0 * 2.0 * k * k / 8.0 / 4.0), 1e-8);
}

TEST(ErrorNorms, StableUnderRefinedQuadrature) {
  const ManufacturedCase c = sine_bubble(Material(1.0, 1.0));
  const SimplicialMesh m = unit_cube_mesh(2);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 1), c);
  const SaddleSolution sol = solve_saddle(m, s);
  const ErrorNorms a = error_norms(m, s, sol.stress, sol.displacement, sol.rotation, c);
  const ErrorNorms b = error_norms(m, s, sol.stress, sol.displacement, sol.rotation, c, 18);
  EXPECT_NEAR(a.stress_hdiv, b.stress_hdiv, 1e-8 * b.stress_hdiv);
  EXPECT_NEAR(a.displacement_l2, b.displacement_l2, 1e-8 * b.displacement_l2);
  EXPECT_NEAR(a.rotation_l2, b.rotation_l2, 1e-8 * b.rotation_l2);
}

TEST(ErrorNorms, ProjectionOfExactSolutionIsBestApproximation) {
  const ManufacturedCase c = sine_bubble(Material(1.0, 1.0));
  const SimplicialMesh m = unit_cube_mesh(1);
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 1), c);
  const SaddleSolution sol = solve_saddle(m, s);
  const DiscreteField bs = stress_field(s, hdiv_projection(m, s, c.stress, c.load));
  const DiscreteField bu = elementwise_field(s, field_projection(m, s, c.displacement), "P_r(V)");
  const ErrorNorms best = error_norms(m, s, bs, bu, bu, c);
  const ErrorNorms got = error_norms(m, s, sol.stress, sol.displacement, sol.rotation, c);
  EXPECT_LE(best.stress_hdiv, got.stress_hdiv * (1.0 + 1e-12));
  EXPECT_LE(best.displacement_l2, got.displacement_l2 * (1.0 + 1e-12));
}

TEST(WriteSolution, CentroidCsvHeader) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const ManufacturedCase c = sine_bubble(Material(1.0, 1.0));
  const BlockSaddleSystem s = assemble(m, uniform_order(m, 0), c);
  const SaddleSolution sol = solve_saddle(m, s);
  std::ostringstream coef, samples;
  write_solution(coef, samples, m, sol);
  const std::string csv = samples.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tet,x,y,z,s11,s12,s13,s21,s22,s23,s31,s32,s33,u1,u2,u3,p1,p2,p3");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(coef.str().rfind("sigma ", 0), 0u);
}
