#include "afw3d/verify.hpp"

#include <algorithm>
#include <cmath>

#include "afw3d/errors.hpp"
#include "afw3d/quadrature.hpp"
#include "afw3d/stability.hpp"
#include "afw3d/tensor_ops.hpp"

namespace afw3d {

namespace {

Mat3 random_mat(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = d(rng);
  return m;
}

PolySet random_poly(int ncomp, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  PolySet p(3, ncomp, degree, 1);
  for (Eigen::Index j = 0; j < p.coef().cols(); ++j) p.coef()(0, j) = d(rng);
  return p;
}

// Barycentric coordinate of the reference tet vanishing on face f.
PolySet face_bubble(int f) {
  PolySet l(3, 1, 1, 1);
  if (f == 0) {
    l.coef() << 1.0, -1.0, -1.0, -1.0;
  } else {
    l.coef()(0, monomial_index(3, Exponent{f == 1 ? 1 : 0, f == 2 ? 1 : 0, f == 3 ? 1 : 0})) = 1.0;
  }
  return l;
}

void add(Table* t, const std::string& suite, const Check& c) {
  if (!t) return;
  if (t->columns.empty()) t->columns = {"suite", "check", "value", "relation", "threshold", "status"};
  t->add_row({suite, c.name, c.value, c.relation, c.threshold, std::string(c.passed ? "pass" : "fail")});
}

DenseMatrix push_map(MomentKind kind, const AffineMap& am) {
  Mat3 l, r;
  if (kind == MomentKind::OneMinus) {
    l = am.a;
    r = am.ainv;
  } else {
    l = am.ainv.transpose();
    r = am.a.transpose();
  }
  DenseMatrix m(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int q = 0; q < 3; ++q) m(3 * i + j, 3 * k + q) = l(i, k) * r(q, j);
  return m;
}

}  // namespace

OrderSignature random_signature(int r, std::mt19937_64& rng) {
  OrderSignature s;
  s.tet = r;
  for (auto& f : s.face) f = std::uniform_int_distribution<int>(0, r)(rng);
  for (int e = 0; e < 6; ++e) {
    int cap = r;
    for (int f = 0; f < 4; ++f)
      if (edge_in_face(e, f)) cap = std::min(cap, s.face[static_cast<std::size_t>(f)]);
    s.edge[static_cast<std::size_t>(e)] = std::uniform_int_distribution<int>(0, cap)(rng);
  }
  return s;
}

SimplicialMesh random_tet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  std::uniform_real_distribution<double> scale(0.3, 2.0);
  const double s = scale(rng);
  std::vector<Vec3> v;
  for (int i = 0; i < 4; ++i) v.push_back(s * (reference_vertex(i) + Vec3(d(rng), d(rng), d(rng))) + Vec3(d(rng), d(rng), d(rng)));
  return build_complex(v, {{0, 1, 2, 3}});
}

double reproduction_error(const SimplicialMesh& mesh, MomentKind kind, const OrderSignature& sig, int members,
                          std::mt19937_64& rng) {
  const double t = kind == MomentKind::Full2 ? 0.0 : select_t(sig.tet);
  const MomentSystem sys = kind == MomentKind::TwoMinus   ? build_moment_system_2minus(sig, t)
                           : kind == MomentKind::OneMinus ? build_moment_system_1minus(sig, t)
                                                          : build_moment_system_full2(sig);
  const AffineMap& am = mesh.affine(0);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double err = 0.0;
  for (int k = 0; k < members; ++k) {
    Vector c(sys.target.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = d(rng);
    const PolySet local = map_components(sys.target.combine(DenseMatrix(c.transpose())), push_map(kind, am));
    const FieldSample u = FieldSample::piecewise(mesh, {local});
    LocalResult lr;
    if (kind == MomentKind::TwoMinus) lr = interp_p2minus(mesh, 0, sig, u);
    else if (kind == MomentKind::OneMinus) lr = interp_p1minus(mesh, 0, sig, u);
    else lr = interp_p2_local(mesh, 0, sig, u);
    err = std::max(err, (lr.coef - c).cwiseAbs().maxCoeff());
  }
  return err;
}

std::vector<Check> tensor_suite(std::uint64_t seed, double tol_scale, Table* table) {
  std::mt19937_64 rng(seed);
  std::vector<Check> out;
  double e1 = 0, e2 = 0, e3 = 0;
  for (int k = 0; k < 100; ++k) {
    const Mat3 w = random_mat(rng);
    const Mat3 q = random_mat(rng);
    e1 = std::max(e1, (s1_inv(s1(w)) - w).cwiseAbs().maxCoeff());
    e2 = std::max(e2, std::abs(frobenius(s1(w), q) - frobenius(w, s1(q))));
    e3 = std::max(e3, (s2(w) - vec_of_antisym(Mat3(w.transpose() - w))).cwiseAbs().maxCoeff());
  }
  out.push_back(make_check("s1_inverse", e1, "<=", 1e-13 * tol_scale, "100 random matrices"));
  out.push_back(make_check("s1_by_parts", e2, "<=", 1e-13 * tol_scale, "100 random pairs"));
  out.push_back(make_check("s2_vec", e3, "<=", 1e-13 * tol_scale, "100 random matrices"));

  double e4 = 0;
  for (int k = 0; k < 20; ++k) {
    const PolySet w = random_poly(9, 3, rng);
    const PolySet sum = div(s1_field(w)) + s2_field(curl(w));
    e4 = std::max(e4, sum.coef().cwiseAbs().maxCoeff());
  }
  out.push_back(make_check("div_s1_plus_s2_curl", e4, "<=", 1e-12 * tol_scale, "20 random cubic fields"));

  double e5 = 0;
  for (int k = 0; k < 10; ++k) {
    const int f = k % 4;
    const Vec3 n = face_frame(f).n;
    const PolySet lam = face_bubble(f);
    PolySet w(3, 9, 4, 1);
    for (int i = 0; i < 3; ++i) {
      const PolySet phi = random_poly(1, 3, rng);
      for (int j = 0; j < 3; ++j) {
        const PolySet v = multiply_scalar(lam, random_poly(1, 2, rng)).raised(4);
        w.component(3 * i + j) = v.coef() + n(j) * phi.raised(4).coef();
      }
    }
    const PolySet s = s1_field(w);
    const QuadRule& q = rule_for(2, 10);
    const auto& fv = face_vertices(f);
    const Vec3 p0 = reference_vertex(fv[0]), p1 = reference_vertex(fv[1]), p2 = reference_vertex(fv[2]);
    Eigen::MatrixX3d pts(q.size(), 3);
    for (Eigen::Index m = 0; m < q.size(); ++m) pts.row(m) = (p0 + q.points(m, 0) * (p1 - p0) + q.points(m, 1) * (p2 - p0)).transpose();
    const auto tab = s.tabulate(pts);
    const double jac = (p1 - p0).cross(p2 - p0).norm();
    double sq = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vector sn = n(0) * tab[static_cast<std::size_t>(3 * i)].col(0) + n(1) * tab[static_cast<std::size_t>(3 * i + 1)].col(0) +
                        n(2) * tab[static_cast<std::size_t>(3 * i + 2)].col(0);
      sq += jac * q.weights.dot(sn.cwiseAbs2());
    }
    e5 = std::max(e5, std::sqrt(sq));
  }
  out.push_back(make_check("trace_lemma", e5, "<=", 1e-11 * tol_scale, "10 random fields with zero tangential trace"));

  double worst = 1e300;
  const Material mats[] = {Material(1.0, 1.0), Material(1e4, 1.0), Material(0.0, 0.5), Material(-0.5, 1.0)};
  for (const auto& m : mats) {
    for (int k = 0; k < 25; ++k) {
      const Mat3 s = random_mat(rng);
      const double ratio = frobenius(compliance_apply(m, s), s) / frobenius(s, s);
      worst = std::min(worst, ratio / m.compliance_lower_bound());
    }
  }
  out.push_back(make_check("compliance_bound", worst, ">=", 1.0 - 1e-12 * tol_scale, "min <A s, s> / (c |s|^2)"));
  for (const auto& c : out) add(table, "tensor", c);
  return out;
}

std::vector<Check> spaces_suite(std::uint64_t seed, double tol_scale, Table* table) {
  std::mt19937_64 rng(seed);
  std::vector<Check> out;
  int dim_mismatch = 0;
  for (int r = 0; r <= 4; ++r) {
    dim_mismatch += basis_full(SpaceTag::P_L3, r).size() != (r + 1) * (r + 2) * (r + 3) / 6;
    dim_mismatch += basis_full(SpaceTag::P_L2, r).size() != (r + 1) * (r + 2) * (r + 3) / 2;
    if (r >= 1) {
      dim_mismatch += basis_full(SpaceTag::PM_L2, r).size() != r * (r + 1) * (r + 3) / 2;
      dim_mismatch += basis_full(SpaceTag::PM_L1, r).size() != r * (r + 2) * (r + 3) / 2;
    }
  }
  out.push_back(make_check("space_dimensions", dim_mismatch, "<=", 0, "P_r, P_r L2, P-_r L2, P-_r L1 for r <= 4"));

  int curl_mismatch = 0;
  for (int r = 1; r <= 4; ++r) {
    const PolySet c = curl(basis_ring(SpaceTag::PM_L1, r + 1).fields);
    const int rank = c.size() == 0 ? 0 : static_cast<int>(numerical_rank(c.coef()));
    curl_mismatch += 3 * rank != (2 * r + 5) * r * (r - 1) / 2;
    curl_mismatch += static_cast<int>(curl_image_basis(r).size()) != (2 * r + 5) * r * (r - 1) / 2;
  }
  out.push_back(make_check("curl_image_dimension", curl_mismatch, "<=", 0, "(2r+5) r (r-1) / 2 for r = 1..4"));

  int excess = 0;
  for (int r = 1; r <= 3; ++r) {
    for (int k = 0; k < 3; ++k) {
      const OrderSignature sig = random_signature(r, rng);
      const PolyBasis b = basis_variable(SpaceTag::P_L2, sig);
      for (int f = 0; f < 4; ++f) {
        const int deg = trace(b.fields, f, TraceKind::Normal).effective_degree(1e-11);
        excess = std::max(excess, deg - sig.face[static_cast<std::size_t>(f)]);
      }
    }
  }
  out.push_back(make_check("variable_trace_degree", excess, "<=", 0, "normal trace degree minus face order"));

  double ring = 0.0;
  for (int r = 1; r <= 4; ++r) {
    const PolySet p = basis_ring(SpaceTag::P_L2, r).fields;
    for (int f = 0; f < 4; ++f) {
      const PolySet tr = trace(p, f, TraceKind::Normal);
      if (tr.size() > 0) ring = std::max(ring, tr.coef().cwiseAbs().maxCoeff() / p.coef().cwiseAbs().maxCoeff());
    }
  }
  out.push_back(make_check("ring_normal_trace", ring, "<=", 1e-12 * tol_scale, "relative, bubble spaces of P_r L2, r <= 4"));

  int seq = 0;
  for (int r = 0; r <= 3; ++r) {
    const PolySet d = div(basis_full(SpaceTag::PM_L2, r + 1).fields);
    seq += numerical_rank(d.coef()) != dim_p(r);
  }
  out.push_back(make_check("div_onto", seq, "<=", 0, "div P-_{r+1} L2 = P_r for r <= 3"));
  for (const auto& c : out) add(table, "spaces", c);
  return out;
}

std::vector<Check> commute_suite(const SimplicialMesh& mesh, const OrderMap& r, int samples, std::uint64_t seed,
                                 double tol_scale, Table* table) {
  std::mt19937_64 rng(seed);
  std::vector<Check> out;
  int singular = 0;
  double worst_score = 1e300;
  for (int order = 0; order <= 3; ++order) {
    const TSelection sel = select_t_detail(order);
    worst_score = std::min(worst_score, sel.score);
    for (int k = 0; k < samples; ++k) {
      const OrderSignature sig = random_signature(order, rng);
      singular += equilibrated_log_det(build_moment_system_2minus(sig, sel.t).c) == -HUGE_VAL;
      singular += equilibrated_log_det(build_moment_system_1minus(sig, sel.t).c) == -HUGE_VAL;
    }
  }
  out.push_back(make_check("moment_systems_singular", singular, "<=", 0, "random signatures, r <= 3"));

  double repro = 0.0;
  for (int k = 0; k < samples; ++k) {
    const SimplicialMesh tet = random_tet(rng);
    const OrderSignature sig = random_signature(k % 3, rng);
    repro = std::max(repro, reproduction_error(tet, MomentKind::TwoMinus, sig, 2, rng));
    repro = std::max(repro, reproduction_error(tet, MomentKind::OneMinus, sig, 2, rng));
  }
  out.push_back(make_check("reproduction", repro, "<=", 1e-10 * tol_scale, "space members re-interpolated"));

  double pull = 0.0;
  for (int k = 0; k < samples; ++k) {
    const SimplicialMesh tet = random_tet(rng);
    const OrderSignature sig = random_signature(k % 3, rng);
    const FieldSample u = transcendental_field(k);
    pull = std::max(pull, (interp_p2minus(tet, 0, sig, u).coef - interp_p2minus_physical(tet, 0, sig, u).coef).cwiseAbs().maxCoeff());
    pull = std::max(pull, (interp_p1minus(tet, 0, sig, u).coef - interp_p1minus_physical(tet, 0, sig, u).coef).cwiseAbs().maxCoeff());
  }
  out.push_back(make_check("pullback_consistency", pull, "<=", 1e-10 * tol_scale, "reference vs physical moments"));

  const DiagramTable d = commuting_diagram_suite(mesh, r, samples, seed);
  out.push_back(make_check("diagram_1", d.max_residual(1), "<=", 1e-9 * tol_scale, "div P2 = P3 div"));
  out.push_back(make_check("diagram_2", d.max_residual(2), "<=", 1e-9 * tol_scale, "P3 div P2- = P3 div"));
  out.push_back(make_check("diagram_3", d.max_residual(3), "<=", 1e-8 * tol_scale, "P2- S1 P1-bar = P2- S1"));
  for (const auto& c : out) add(table, "commute", c);
  (void)worst_score;
  return out;
}

}  // namespace afw3d
