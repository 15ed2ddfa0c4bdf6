#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "afw3d/errors.hpp"
#include "afw3d/interp.hpp"
#include "afw3d/quadrature.hpp"
#include "afw3d/stability.hpp"
#include "afw3d/verify.hpp"

using namespace afw3d;

namespace {

constexpr double kPi = 3.14159265358979323846;

SimplicialMesh single_tet(double scale = 1.0) {
  const Vec3 o(0.1, 0.0, 0.2);
  return build_complex({o, o + scale * Vec3(1.0, 0.1, 0.0), o + scale * Vec3(0.1, 0.9, 0.1), o + scale * Vec3(-0.1, 0.2, 1.1)},
                       {{0, 1, 2, 3}});
}

SimplicialMesh two_tets() {
  return build_complex({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(0.9, 0.8, 0.7)},
                       {{0, 1, 2, 3}, {1, 2, 3, 4}});
}

Eigen::MatrixX3d physical_points(const AffineMap& am, const Eigen::MatrixX3d& ref) {
  return (ref * am.a.transpose()).rowwise() + am.b.transpose();
}

// L2 norm over the mesh of a sampled field, or of its gradient.
double field_norm(const SimplicialMesh& m, const FieldSample& f, bool gradient = false) {
  const QuadRule& q = rule_for(3, 12);
  double s = 0.0;
  for (int t = 0; t < m.num_tets(); ++t) {
    const AffineMap& am = m.affine(t);
    const Eigen::MatrixX3d phys = physical_points(am, q.points);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      const double v = gradient ? f.gradient(t, phys.row(i).transpose()).squaredNorm() : f.value(t, phys.row(i).transpose()).squaredNorm();
      s += std::abs(am.det) * q.weights(i) * v;
    }
  }
  return std::sqrt(s);
}

// Physical curl of a local matrix polynomial, row-wise.
PolySet physical_curl(const PolySet& w, const AffineMap& am) {
  const PolySet g = physical_gradient(w, am);
  DenseMatrix m = DenseMatrix::Zero(9, 27);
  auto d = [](int i, int j, int k) { return 3 * (3 * i + j) + k; };
  for (int i = 0; i < 3; ++i) {
    m(3 * i + 0, d(i, 2, 1)) = 1.0;
    m(3 * i + 0, d(i, 1, 2)) = -1.0;
    m(3 * i + 1, d(i, 0, 2)) = 1.0;
    m(3 * i + 1, d(i, 2, 0)) = -1.0;
    m(3 * i + 2, d(i, 1, 0)) = 1.0;
    m(3 * i + 2, d(i, 0, 1)) = -1.0;
  }
  return map_components(g, m);
}

double curl_norm(const SimplicialMesh& m, const DiscreteField& f) {
  double s = 0.0;
  for (int t = 0; t < m.num_tets(); ++t) {
    const double n = local_l2_norm(m, t, physical_curl(f.local[static_cast<std::size_t>(t)], m.affine(t)));
    s += n * n;
  }
  return std::sqrt(s);
}

double max_local_diff(const SimplicialMesh& m, const std::vector<PolySet>& a, const std::vector<PolySet>& b) {
  double e = 0.0;
  for (int t = 0; t < m.num_tets(); ++t)
    e = std::max(e, local_l2_norm(m, t, a[static_cast<std::size_t>(t)] - b[static_cast<std::size_t>(t)]));
  return e;
}

FieldSample constant_matrix(const Mat3& c) {
  return FieldSample::smooth_matrix([c](const Vec3&) { return c; });
}

}  // namespace

TEST(ProjectL2, ReproducesSpaceMembers) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const OrderMap r = uniform_order(m, 2);
  const FieldSample f = random_polynomial_field(3, 2, 7);
  const DiscreteField p = project_l2_p3(m, r, f);
  EXPECT_LE(field_norm(m, f - p.as_field(m)), 1e-12);
}

TEST(ProjectL2, Constant) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const FieldSample f = FieldSample::smooth(1, [](const Vec3&) { return Eigen::VectorXd::Constant(1, 2.5); });
  for (int r = 0; r <= 3; ++r) EXPECT_LE(field_norm(m, f - project_l2_p3(m, uniform_order(m, r), f).as_field(m)), 1e-13);
}

TEST(ProjectL2, MatchesDenseNormalEquations) {
  const SimplicialMesh m = single_tet();
  const FieldSample f = FieldSample::smooth(1, [](const Vec3& x) { return Eigen::VectorXd::Constant(1, std::sin(x(0))); });
  const PolySet proj = project_l2_p3(m, uniform_order(m, 2), f).local[0];

  const QuadRule& q = rule_for(3, 16);
  const AffineMap& am = m.affine(0);
  const DenseMatrix mono = monomial_table(3, 2, q.points);
  const Eigen::MatrixX3d phys = physical_points(am, q.points);
  Vector fv(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) fv(i) = std::sin(phys(i, 0));
  const DenseMatrix gram = mono.transpose() * q.weights.asDiagonal() * mono;
  const Vector c = gram.ldlt().solve(mono.transpose() * q.weights.asDiagonal() * fv);

  const Eigen::MatrixX3d pts = rule_for(3, 4).points;
  const DenseMatrix got = proj.tabulate(pts)[0];
  const Vector want = monomial_table(3, 2, pts) * c;
  EXPECT_LE((got.col(0) - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InterpP2, ReproducesSpaceMembers) {
  const SimplicialMesh m = unit_cube_mesh(1);
  for (int r = 0; r <= 2; ++r) {
    const FieldSample u = random_polynomial_field(9, r + 1, 10 + r);
    const DiscreteField p = interp_p2(m, uniform_order(m, r), u);
    EXPECT_LE(field_norm(m, u - p.as_field(m)), 1e-10 * field_norm(m, u)) << r;
  }
}

TEST(InterpP2, DivergenceCommutes) {
  const SimplicialMesh m = unit_cube_mesh(1);
  const OrderMap r = uniform_order(m, 1);
  for (int k = 0; k < 10; ++k) {
    const FieldSample u = random_polynomial_field(9, 3, 100 + k);
    const DiscreteField p = interp_p2(m, r, u);
    std::vector<PolySet> div_p;
    for (int t = 0; t < m.num_tets(); ++t) div_p.push_back(physical_divergence(p.local[static_cast<std::size_t>(t)], m.affine(t)));
    const DiscreteField q = project_l2_p3(m, r, u.divergence());
    EXPECT_LE(max_local_diff(m, div_p, q.local), 1e-10);
  }
}

TEST(InterpP2, BoundedByH1Norm) {
  const FieldSample u = transcendental_field(0);
  std::vector<double> c;
  for (int n : {1, 2, 4}) {
    const SimplicialMesh m = unit_cube_mesh(n);
    const double h1 = std::hypot(field_norm(m, u), field_norm(m, u, true));
    c.push_back(field_norm(m, interp_p2(m, uniform_order(m, 0), u).as_field(m)) / h1);
  }
  EXPECT_LE(relative_drift(c), 0.25);
}

TEST(MomentSystem, SquareAndNonsingularAtZero) {
  for (int r = 0; r <= 3; ++r) {
    const MomentSystem s = build_moment_system_2minus(OrderSignature::uniform(r), 0.0);
    EXPECT_EQ(s.c.rows(), s.c.cols());
    EXPECT_EQ(s.c.cols(), 3 * basis_full(SpaceTag::PM_L2, r + 1).size());
    EXPECT_NE(det_sign_and_logmag(s.c).sign, 0) << r;
  }
}

TEST(MomentSystem, DeterminantIsNonzeroPolynomialInT) {
  std::mt19937_64 rng(3);
  const OrderSignature sig = random_signature(3, rng);
  int nonzero = 0;
  for (int j = 0; j <= 32; ++j) nonzero += det_sign_and_logmag(build_moment_system_2minus(sig, j / 32.0).c).sign != 0;
  EXPECT_GT(nonzero, 0);
}

TEST(SelectT, LowestOrderNonsingularOnWholeGrid) {
  const OrderSignature sig = OrderSignature::uniform(0);
  for (int j = 0; j <= 64; ++j) {
    EXPECT_NE(det_sign_and_logmag(build_moment_system_2minus(sig, j / 64.0).c).sign, 0);
    EXPECT_NE(det_sign_and_logmag(build_moment_system_1minus(sig, j / 64.0).c).sign, 0);
  }
}

TEST(SelectT, NonsingularAndDeterministic) {
  const double t = select_t(2);
  EXPECT_EQ(select_t(2), t);
  EXPECT_NE(det_sign_and_logmag(build_moment_system_2minus(OrderSignature::uniform(2), t).c).sign, 0);
  EXPECT_NE(det_sign_and_logmag(build_moment_system_1minus(OrderSignature::uniform(2), t).c).sign, 0);
  EXPECT_EQ(select_t_detail(2).t, select_t_detail(2).grid_index / 64.0);
}

TEST(InterpP2Minus, ReproducesSpaceMembers) {
  std::mt19937_64 rng(4);
  for (int r = 0; r <= 3; ++r) {
    const SimplicialMesh m = random_tet(rng);
    const OrderSignature sig = random_signature(r, rng);
    EXPECT_LE(reproduction_error(m, MomentKind::TwoMinus, sig, 5, rng), 1e-11) << to_string(sig);
    EXPECT_LE(reproduction_error(m, MomentKind::Full2, sig, 5, rng), 1e-11) << to_string(sig);
  }
}

TEST(InterpP2Minus, PullbackConsistency) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    const SimplicialMesh m = random_tet(rng);
    const OrderSignature sig = random_signature(2, rng);
    const FieldSample u = transcendental_field(k % 3);
    EXPECT_LE((interp_p2minus(m, 0, sig, u).coef - interp_p2minus_physical(m, 0, sig, u).coef).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(InterpP2Minus, ProjectedDivergenceCommutes) {
  const SimplicialMesh m = single_tet();
  std::mt19937_64 rng(6);
  const OrderSignature sig = random_signature(2, rng);
  OrderMap r = uniform_order(m, sig.tet);
  for (int k = 0; k < 10; ++k) {
    const FieldSample u = random_polynomial_field(9, 4, 200 + k);
    const PolySet d = physical_divergence(interp_p2minus(m, 0, sig, u).field, m.affine(0));
    const DiscreteField lhs = project_l2_p3(m, r, FieldSample::piecewise(m, {d}));
    const DiscreteField rhs = project_l2_p3(m, r, u.divergence());
    EXPECT_LE(max_local_diff(m, lhs.local, rhs.local), 1e-10);
  }
}

TEST(InterpP1Minus, ReproducesSpaceMembers) {
  std::mt19937_64 rng(7);
  for (int r = 0; r <= 3; ++r) {
    const SimplicialMesh m = random_tet(rng);
    EXPECT_LE(reproduction_error(m, MomentKind::OneMinus, random_signature(r, rng), 5, rng), 1e-10);
  }
}

TEST(InterpP1Minus, S1DiagramOnElement) {
  const SimplicialMesh m = single_tet();
  std::mt19937_64 rng(8);
  const OrderSignature sig = random_signature(2, rng);
  for (int k = 0; k < 10; ++k) {
    const FieldSample w = random_polynomial_field(9, 4, 300 + k);
    const PolySet wh = interp_p1minus(m, 0, sig, w).field;
    const Vector lhs = interp_p2minus(m, 0, sig, FieldSample::piecewise(m, {s1_field(wh)})).coef;
    const Vector rhs = interp_p2minus(m, 0, sig, s1_of(w)).coef;
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(InterpP1Minus, CurlScalesWithElementSize) {
  const FieldSample w = transcendental_field(1);
  const OrderSignature sig = OrderSignature::uniform(1);
  std::vector<double> c;
  for (double s : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
    const SimplicialMesh m = single_tet(s);
    const PolySet wh = interp_p1minus(m, 0, sig, w).field;
    const double lhs = local_l2_norm(m, 0, physical_curl(wh, m.affine(0)));
    const double rhs = field_norm(m, w) / m.affine(0).h + std::hypot(field_norm(m, w), field_norm(m, w, true));
    c.push_back(lhs / rhs);
  }
  // The target space has no constants, so h^{-1} ||W|| takes over as s shrinks
  // and the ratio levels off.
  const double fitted = std::max({c[0], c[1], c[2]});
  EXPECT_LE(c[3], 1.5 * fitted);
  EXPECT_LE(c[4], 1.5 * fitted);
  EXPECT_LT(c[4] - c[3], c[3] - c[2]);
}

TEST(Clement, ReproducesConstants) {
  const SimplicialMesh m = unit_cube_mesh(2);
  Mat3 c;
  c << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  EXPECT_LE(field_norm(m, constant_matrix(c) - clement(m, constant_matrix(c)).as_field(m)), 1e-13);
}

TEST(Clement, VertexValuesArePatchAverages) {
  const SimplicialMesh m = unit_cube_mesh(2);
  const Mat3 g = (Mat3() << 1, -2, 0.5, 0.3, 0.7, -1, 2, 0, 1).finished();
  const FieldSample w = FieldSample::smooth_matrix([g](const Vec3& x) { return Mat3(x(0) * g + x(1) * g.transpose() - x(2) * Mat3::Identity()); });
  const DiscreteField rh = clement(m, w);
  for (int v = 0; v < m.num_vertices(); ++v) {
    Vec3 centroid = Vec3::Zero();
    double vol = 0.0;
    int host = -1, slot = -1;
    for (int t = 0; t < m.num_tets(); ++t)
      for (int i = 0; i < 4; ++i)
        if (m.tet(t)[static_cast<std::size_t>(i)] == v) {
          Vec3 ct = Vec3::Zero();
          for (int k : m.tet(t)) ct += 0.25 * m.vertex(k);
          centroid += m.volume(t) * ct;
          vol += m.volume(t);
          host = t;
          slot = i;
        }
    const Eigen::VectorXd want = w.value(host, centroid / vol);
    const Eigen::VectorXd got = rh.local[static_cast<std::size_t>(host)].evaluate(0, reference_vertex(slot));
    EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12) << v;
  }
}

TEST(Clement, FirstOrderApproximation) {
  const FieldSample w = FieldSample::smooth(
      9,
      [](const Vec3& x) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(9);
        v(0) = v(4) = v(8) = std::sin(kPi * x(0));
        return v;
      },
      [](const Vec3& x) {
        DenseMatrix d = DenseMatrix::Zero(9, 3);
        d(0, 0) = d(4, 0) = d(8, 0) = kPi * std::cos(kPi * x(0));
        return d;
      });
  std::vector<double> c;
  for (int n : {1, 2, 4}) {
    const SimplicialMesh m = unit_cube_mesh(n);
    const double err = field_norm(m, w - clement(m, w).as_field(m));
    c.push_back(err / (mesh_size(m) * std::hypot(field_norm(m, w), field_norm(m, w, true))));
  }
  EXPECT_LE(*std::max_element(c.begin(), c.end()) / *std::min_element(c.begin(), c.end()), 2.0);
}

TEST(Stabilized, ReproducesConstants) {
  const SimplicialMesh m = unit_cube_mesh(1);
  Mat3 c;
  c << 0.5, 1, -1, 2, 0, 1, 3, -2, 1;
  const DiscreteField p = interp_p1minus_stabilized(m, uniform_order(m, 1), constant_matrix(c));
  EXPECT_LE(field_norm(m, constant_matrix(c) - p.as_field(m)), 1e-12);
}

TEST(Stabilized, CurlBoundedByH1Norm) {
  const FieldSample w = transcendental_field(2);
  std::vector<double> c;
  for (int n : {1, 2, 4}) {
    const SimplicialMesh m = unit_cube_mesh(n);
    const DiscreteField p = interp_p1minus_stabilized(m, uniform_order(m, 0), w);
    c.push_back(curl_norm(m, p) / std::hypot(field_norm(m, w), field_norm(m, w, true)));
  }
  EXPECT_LE(relative_drift(c), 0.25);
}

TEST(ElementwiseToGlobal, NormalTracesMatch) {
  const SimplicialMesh m = two_tets();
  const DiscreteField p = interp_p2minus_global(m, uniform_order(m, 1), transcendental_field(0));
  EXPECT_LE(interface_jump(m, p, Continuity::Normal), 1e-11);
  const DiscreteField w = interp_p1minus_global(m, uniform_order(m, 1), transcendental_field(1));
  EXPECT_LE(interface_jump(m, w, Continuity::Tangential), 1e-11);
}

TEST(ElementwiseToGlobal, RejectsDiscontinuousInput) {
  const SimplicialMesh m = two_tets();
  const OrderSignature sig = OrderSignature::uniform(1);
  const FieldSample a = transcendental_field(0);
  const FieldSample b = transcendental_field(1);
  std::vector<LocalResult> parts{interp_p2minus(m, 0, sig, a), interp_p2minus(m, 1, sig, b)};
  EXPECT_THROW(elementwise_to_global(m, parts, Continuity::Normal, "P-2"), ConformityViolation);
}

TEST(ElementwiseToGlobal, SingleTetMatchesElementOperator) {
  const SimplicialMesh m = single_tet();
  const FieldSample u = transcendental_field(2);
  const LocalResult local = interp_p2minus(m, 0, OrderSignature::uniform(2), u);
  const DiscreteField global = interp_p2minus_global(m, uniform_order(m, 2), u);
  EXPECT_LE((global.coef[0] - local.coef).cwiseAbs().maxCoeff(), 1e-15);
}
