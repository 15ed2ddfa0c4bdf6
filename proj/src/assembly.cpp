#include "afw3d/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "afw3d/errors.hpp"
#include "afw3d/quadrature.hpp"

namespace afw3d {

namespace {

int tri_dim(int d) { return d < 0 ? 0 : (d + 1) * (d + 2) / 2; }

int assembly_degree(int r) { return std::min(kMaxQuadratureDegree, std::max(kFieldQuadratureDegree, 2 * r + 4)); }

PolySet face_tests(int d) {
  const int n = frame_size(2, d);
  return orthonormalize(PolySet(2, 1, d, DenseMatrix(DenseMatrix::Identity(n, n))));
}

// Reference points of face f for a triangle rule given in (s1, s2).
Eigen::MatrixX3d face_points(int f, const Eigen::MatrixX3d& st) {
  const auto& fv = face_vertices(f);
  const Vec3 p0 = reference_vertex(fv[0]);
  const Vec3 p1 = reference_vertex(fv[1]);
  const Vec3 p2 = reference_vertex(fv[2]);
  Eigen::MatrixX3d pts(st.rows(), 3);
  for (Eigen::Index k = 0; k < st.rows(); ++k)
    pts.row(k) = (p0 + st(k, 0) * (p1 - p0) + st(k, 1) * (p2 - p0)).transpose();
  return pts;
}

Eigen::MatrixX3d to_physical(const AffineMap& am, const Eigen::MatrixX3d& ref) {
  return (ref * am.a.transpose()).rowwise() + am.b.transpose();
}

// Levi-Civita symbol; S2(U)_a = sum_ij eps(a, i, j) U_ij.
double eps(int a, int i, int j) {
  if (a == i || i == j || a == j) return 0.0;
  return ((i - a + 3) % 3 == 1) ? 1.0 : -1.0;
}

}  // namespace

DofMap build_dof_map(const SimplicialMesh& mesh, const OrderMap& r) {
  const OrderReport rep = validate_order_map(mesh, r);
  if (!rep.ok) {
    const auto& v = rep.violations.front();
    throw NonMonotoneOrder(v.kind + " at subsimplex " + std::to_string(v.lower_id));
  }
  DofMap d;
  d.face_offset.resize(static_cast<std::size_t>(mesh.num_faces()));
  d.face_count.resize(static_cast<std::size_t>(mesh.num_faces()));
  int next = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    d.face_offset[static_cast<std::size_t>(f)] = next;
    d.face_count[static_cast<std::size_t>(f)] = tri_dim(r.face[static_cast<std::size_t>(f)] + 1);
    next += d.face_count[static_cast<std::size_t>(f)];
  }
  const int nt = mesh.num_tets();
  d.interior_offset.resize(static_cast<std::size_t>(nt));
  d.interior_count.resize(static_cast<std::size_t>(nt));
  d.field_offset.resize(static_cast<std::size_t>(nt));
  d.field_dim.resize(static_cast<std::size_t>(nt));
  d.stress_local.resize(static_cast<std::size_t>(nt));
  d.signature.resize(static_cast<std::size_t>(nt));
  int field = 0;
  for (int t = 0; t < nt; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    d.signature[ts] = signature_of(mesh, r, t);
    const int order = r.tet[ts];
    d.interior_offset[ts] = next;
    d.interior_count[ts] = static_cast<int>(basis_ring(SpaceTag::P_L2, order + 1).size());
    next += d.interior_count[ts];
    d.field_offset[ts] = field;
    d.field_dim[ts] = dim_p(order);
    field += 3 * d.field_dim[ts];
  }
  d.scalar_stress = next;
  d.displacement = field;
  d.rotation = field;
  for (int t = 0; t < nt; ++t) {
    auto& ids = d.stress_local[static_cast<std::size_t>(t)];
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.tet_faces(t)[static_cast<std::size_t>(i)];
      for (int k = 0; k < d.face_count[static_cast<std::size_t>(f)]; ++k) ids.push_back(d.face_offset[static_cast<std::size_t>(f)] + k);
    }
    for (int k = 0; k < d.interior_count[static_cast<std::size_t>(t)]; ++k)
      ids.push_back(d.interior_offset[static_cast<std::size_t>(t)] + k);
  }
  return d;
}

ElementBasis element_basis(const SimplicialMesh& mesh, const DofMap& dofs, int tet) {
  const auto ts = static_cast<std::size_t>(tet);
  const OrderSignature& sig = dofs.signature[ts];
  const AffineMap& am = mesh.affine(tet);
  const PolySet phi = basis_variable(SpaceTag::P_L2, sig.shifted(1)).fields;
  const Eigen::Index n = phi.size();
  if (static_cast<Eigen::Index>(dofs.stress_local[ts].size()) != n) {
    throw DimensionMismatch("tet " + std::to_string(tet) + ": " + std::to_string(dofs.stress_local[ts].size()) +
                            " stress dofs for a local space of dimension " + std::to_string(n));
  }
  DenseMatrix d(n, n);
  Eigen::Index row = 0;
  for (int i = 0; i < 4; ++i) {
    const int f = mesh.tet_faces(tet)[static_cast<std::size_t>(i)];
    const int deg = sig.face[static_cast<std::size_t>(i)] + 1;
    const QuadRule& q = rule_for(2, 2 * sig.tet + 2);
    const Eigen::MatrixX3d pts = face_points(i, q.points);
    const auto tab = phi.tabulate(pts);
    const DenseMatrix qt = face_tests(deg).tabulate(q.points)[0];
    // tau . n_F = (A^T n_F) . phî / det
    const Vec3 an = am.a.transpose() * mesh.face_normal(f) / am.det;
    const DenseMatrix normal = an(0) * tab[0] + an(1) * tab[1] + an(2) * tab[2];
    const Vector w = q.weights * (2.0 * mesh.face_area(f));
    d.middleRows(row, qt.cols()) = qt.transpose() * w.asDiagonal() * normal;
    row += qt.cols();
  }
  const PolySet ring = basis_ring(SpaceTag::P_L2, sig.tet + 1).fields;
  d.middleRows(row, ring.size()) = l2_gram(ring, phi);
  DenseLU lu(d);
  if (lu.singular()) throw SingularMomentSystem("stress dofs are not unisolvent on tet " + std::to_string(tet));
  const DenseMatrix nodal = lu.solve(DenseMatrix(DenseMatrix::Identity(n, n)));
  ElementBasis eb;
  eb.psi = map_components(phi.combine(nodal.transpose()), am.a / am.det);
  eb.field_basis = (1.0 / std::sqrt(std::abs(am.det))) * orthonormalize(basis_full(SpaceTag::P_L3, sig.tet).fields);
  return eb;
}

SparseMatrix BlockSaddleSystem::matrix() const {
  const int ns = dofs.stress();
  const int nu = dofs.displacement;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * (b1.nonZeros() + b2.nonZeros())));
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < b1.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(b1, k); it; ++it) {
      trip.emplace_back(ns + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), ns + it.row(), it.value());
    }
  for (int k = 0; k < b2.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(b2, k); it; ++it) {
      trip.emplace_back(ns + nu + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), ns + nu + it.row(), it.value());
    }
  return sparse_from_triplets(dofs.total(), dofs.total(), trip);
}

Vector BlockSaddleSystem::rhs() const {
  Vector b = Vector::Zero(dofs.total());
  b.head(dofs.stress()) = rhs_stress;
  b.segment(dofs.stress(), dofs.displacement) = rhs_disp;
  return b;
}

BlockSaddleSystem assemble(const SimplicialMesh& mesh, const OrderMap& r, const Material& material,
                           const FieldSample& load, const std::optional<FieldSample>& boundary) {
  BlockSaddleSystem sys;
  sys.dofs = build_dof_map(mesh, r);
  sys.material = material;
  const DofMap& dm = sys.dofs;
  const int ns = dm.scalar_stress;
  const double mu = material.mu();
  const double lam = material.lambda();
  const double c0 = lam / (2.0 * mu * (2.0 * mu + 3.0 * lam));

  std::vector<Triplet> ta, tb1, tb2, tm, tdd;
  sys.rhs_stress = Vector::Zero(dm.stress());
  sys.rhs_disp = Vector::Zero(dm.displacement);
  sys.elements.reserve(static_cast<std::size_t>(mesh.num_tets()));

  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    sys.elements.push_back(element_basis(mesh, dm, t));
    const ElementBasis& eb = sys.elements.back();
    const AffineMap& am = mesh.affine(t);
    const auto& ids = dm.stress_local[ts];
    const Eigen::Index n = eb.psi.size();
    const Eigen::Index m = eb.field_basis.size();
    const int off = dm.field_offset[ts];

    const QuadRule& q = rule_for(3, assembly_degree(dm.signature[ts].tet));
    const Vector w = q.weights * std::abs(am.det);
    const auto psi = eb.psi.tabulate(q.points);
    const DenseMatrix dpsi = physical_divergence(eb.psi, am).tabulate(q.points)[0];
    const DenseMatrix chi = eb.field_basis.tabulate(q.points)[0];

    std::array<std::array<DenseMatrix, 3>, 3> g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            psi[static_cast<std::size_t>(i)].transpose() * w.asDiagonal() * psi[static_cast<std::size_t>(j)];
    const DenseMatrix mass = g[0][0] + g[1][1] + g[2][2];
    const DenseMatrix dd = dpsi.transpose() * w.asDiagonal() * dpsi;
    const DenseMatrix bdiv = chi.transpose() * w.asDiagonal() * dpsi;
    std::array<DenseMatrix, 3> bval;
    for (int j = 0; j < 3; ++j) bval[static_cast<std::size_t>(j)] = chi.transpose() * w.asDiagonal() * psi[static_cast<std::size_t>(j)];

    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
          for (Eigen::Index l = 0; l < n; ++l) {
            const int gi = i * ns + ids[static_cast<std::size_t>(k)];
            const int gj = j * ns + ids[static_cast<std::size_t>(l)];
            double v = -c0 * g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](k, l);
            if (i == j) {
              v += mass(k, l) / (2.0 * mu);
              tm.emplace_back(gi, gj, mass(k, l));
              tdd.emplace_back(gi, gj, dd(k, l));
            }
            ta.emplace_back(gi, gj, v);
          }

    for (int i = 0; i < 3; ++i)
      for (Eigen::Index mm = 0; mm < m; ++mm)
        for (Eigen::Index l = 0; l < n; ++l) {
          const int row = off + i * static_cast<int>(m) + static_cast<int>(mm);
          const int col = i * ns + ids[static_cast<std::size_t>(l)];
          tb1.emplace_back(row, col, bdiv(mm, l));
        }

    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double e = eps(a, i, j);
          if (e == 0.0) continue;
          for (Eigen::Index mm = 0; mm < m; ++mm)
            for (Eigen::Index l = 0; l < n; ++l)
              tb2.emplace_back(off + a * static_cast<int>(m) + static_cast<int>(mm), i * ns + ids[static_cast<std::size_t>(l)],
                               -e * bval[static_cast<std::size_t>(j)](mm, l));
        }

    const DenseMatrix fv = load.values(t, to_physical(am, q.points), q.points);
    const DenseMatrix fl = chi.transpose() * w.asDiagonal() * fv;  // (m x 3)
    for (int i = 0; i < 3; ++i)
      for (Eigen::Index mm = 0; mm < m; ++mm) sys.rhs_disp(off + i * static_cast<int>(m) + static_cast<int>(mm)) += fl(mm, i);

    if (boundary) {
      for (int i = 0; i < 4; ++i) {
        const int f = mesh.tet_faces(t)[static_cast<std::size_t>(i)];
        if (!mesh.is_boundary_face(f)) continue;
        const QuadRule& fq = rule_for(2, assembly_degree(dm.signature[ts].tet));
        const Eigen::MatrixX3d ref = face_points(i, fq.points);
        const auto ft = eb.psi.tabulate(ref);
        const Vec3 nrm = static_cast<double>(mesh.face_orientation(t, i)) * mesh.face_normal(f);
        const DenseMatrix tn = nrm(0) * ft[0] + nrm(1) * ft[1] + nrm(2) * ft[2];
        const DenseMatrix gv = boundary->values(t, to_physical(am, ref), ref);
        const Vector fw = fq.weights * (2.0 * mesh.face_area(f));
        const DenseMatrix contrib = tn.transpose() * fw.asDiagonal() * gv;  // (n x 3)
        for (int row = 0; row < 3; ++row)
          for (Eigen::Index k = 0; k < n; ++k) sys.rhs_stress(row * ns + ids[static_cast<std::size_t>(k)]) += contrib(k, row);
      }
    }
  }
  sys.a = sparse_from_triplets(dm.stress(), dm.stress(), ta);
  sys.mass = sparse_from_triplets(dm.stress(), dm.stress(), tm);
  sys.divdiv = sparse_from_triplets(dm.stress(), dm.stress(), tdd);
  sys.b1 = sparse_from_triplets(dm.displacement, dm.stress(), tb1);
  sys.b2 = sparse_from_triplets(dm.rotation, dm.stress(), tb2);
  return sys;
}

BlockSaddleSystem assemble(const SimplicialMesh& mesh, const OrderMap& r, const ManufacturedCase& c) {
  return assemble(mesh, r, c.material, c.load, c.boundary_displacement);
}

DiscreteField stress_field(const BlockSaddleSystem& sys, const Vector& sigma) {
  DiscreteField out;
  out.space = "P_{r+1}L2(V)";
  const int ns = sys.dofs.scalar_stress;
  for (std::size_t t = 0; t < sys.elements.size(); ++t) {
    const PolySet& psi = sys.elements[t].psi;
    const auto& ids = sys.dofs.stress_local[t];
    const Eigen::Index n = psi.size();
    Vector c(3 * n);
    PolySet loc(3, 9, psi.degree(), 1);
    for (int i = 0; i < 3; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) c(i * n + k) = sigma(i * ns + ids[static_cast<std::size_t>(k)]);
      for (int j = 0; j < 3; ++j) loc.component(3 * i + j) = c.segment(i * n, n).transpose() * psi.component(j);
    }
    out.coef.push_back(c);
    out.local.push_back(loc);
  }
  return out;
}

DiscreteField elementwise_field(const BlockSaddleSystem& sys, const Vector& coef, const std::string& space) {
  DiscreteField out;
  out.space = space;
  for (std::size_t t = 0; t < sys.elements.size(); ++t) {
    const PolySet& chi = sys.elements[t].field_basis;
    const Eigen::Index m = chi.size();
    const Vector c = coef.segment(sys.dofs.field_offset[t], 3 * m);
    PolySet loc(3, 3, chi.degree(), 1);
    for (int i = 0; i < 3; ++i) loc.component(i) = c.segment(i * m, m).transpose() * chi.coef();
    out.coef.push_back(c);
    out.local.push_back(loc);
  }
  return out;
}

SaddleSolution solve_saddle(const SimplicialMesh& mesh, const BlockSaddleSystem& sys) {
  (void)mesh;
  const SparseMatrix k = sys.matrix();
  const Vector b = sys.rhs();
  SaddleSolution sol;
  Vector x;
  try {
    SparseDirectSolver solver(k);
    x = solver.solve(b);
  } catch (const SingularMatrix& e) {
    throw FactorizationBreakdown(std::string("saddle point factorization failed: ") + e.what());
  }
  const double bn = b.norm();
  const double rn = (k * x - b).norm();
  sol.residual = bn > 0.0 ? rn / bn : rn;
  if (!std::isfinite(sol.residual) || sol.residual > default_tolerances().solve_residual) {
    throw FactorizationBreakdown("saddle point residual " + std::to_string(sol.residual));
  }
  const DofMap& d = sys.dofs;
  sol.sigma = x.head(d.stress());
  sol.u = x.segment(d.stress(), d.displacement);
  sol.p = x.tail(d.rotation);
  sol.stress = stress_field(sys, sol.sigma);
  sol.displacement = elementwise_field(sys, sol.u, "P_r(V)");
  sol.rotation = elementwise_field(sys, sol.p, "P_r(V)");
  return sol;
}

ErrorNorms error_norms(const SimplicialMesh& mesh, const BlockSaddleSystem& sys, const DiscreteField& stress,
                       const DiscreteField& displacement, const DiscreteField& rotation, const ManufacturedCase& c,
                       int degree) {
  int rmax = 0;
  for (const auto& s : sys.dofs.signature) rmax = std::max(rmax, s.tet);
  const int deg = degree > 0 ? std::min(degree, kMaxQuadratureDegree) : assembly_degree(rmax);
  const QuadRule& q = rule_for(3, deg);
  double es = 0, ed = 0, eu = 0, ep = 0;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const AffineMap& am = mesh.affine(t);
    const Eigen::MatrixX3d phys = to_physical(am, q.points);
    const Vector w = q.weights * std::abs(am.det);
    auto err = [&](const FieldSample& exact, const PolySet& local) {
      const DenseMatrix ev = exact.values(t, phys, q.points);
      const auto tab = local.tabulate(q.points);
      double s = 0.0;
      for (int k = 0; k < local.ncomp(); ++k) s += w.dot((ev.col(k) - tab[static_cast<std::size_t>(k)].col(0)).cwiseAbs2());
      return s;
    };
    es += err(c.stress, stress.local[ts]);
    ed += err(c.load, physical_divergence(stress.local[ts], am));
    eu += err(c.displacement, displacement.local[ts]);
    ep += err(c.rotation, rotation.local[ts]);
  }
  ErrorNorms n;
  n.stress_l2 = std::sqrt(es);
  n.stress_div = std::sqrt(ed);
  n.stress_hdiv = std::sqrt(es + ed);
  n.displacement_l2 = std::sqrt(eu);
  n.rotation_l2 = std::sqrt(ep);
  return n;
}

Vector hdiv_projection(const SimplicialMesh& mesh, const BlockSaddleSystem& sys, const FieldSample& sigma,
                       const FieldSample& div_sigma) {
  const int ns = sys.dofs.scalar_stress;
  Vector b = Vector::Zero(sys.dofs.stress());
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const ElementBasis& eb = sys.elements[ts];
    const AffineMap& am = mesh.affine(t);
    const QuadRule& q = rule_for(3, assembly_degree(sys.dofs.signature[ts].tet));
    const Eigen::MatrixX3d phys = to_physical(am, q.points);
    const Vector w = q.weights * std::abs(am.det);
    const auto psi = eb.psi.tabulate(q.points);
    const DenseMatrix dpsi = physical_divergence(eb.psi, am).tabulate(q.points)[0];
    const DenseMatrix sv = sigma.values(t, phys, q.points);
    const DenseMatrix dv = div_sigma.values(t, phys, q.points);
    const auto& ids = sys.dofs.stress_local[ts];
    for (int i = 0; i < 3; ++i) {
      Vector loc = dpsi.transpose() * w.asDiagonal() * dv.col(i);
      for (int j = 0; j < 3; ++j) loc += psi[static_cast<std::size_t>(j)].transpose() * w.asDiagonal() * sv.col(3 * i + j);
      for (Eigen::Index k = 0; k < loc.size(); ++k) b(i * ns + ids[static_cast<std::size_t>(k)]) += loc(k);
    }
  }
  SparseDirectSolver solver(sys.hdiv_gram());
  return solver.solve(b);
}

Vector field_projection(const SimplicialMesh& mesh, const BlockSaddleSystem& sys, const FieldSample& v) {
  Vector c = Vector::Zero(sys.dofs.displacement);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const ElementBasis& eb = sys.elements[ts];
    const AffineMap& am = mesh.affine(t);
    const QuadRule& q = rule_for(3, assembly_degree(sys.dofs.signature[ts].tet));
    const Vector w = q.weights * std::abs(am.det);
    const DenseMatrix chi = eb.field_basis.tabulate(q.points)[0];
    const DenseMatrix vv = v.values(t, to_physical(am, q.points), q.points);
    const DenseMatrix loc = chi.transpose() * w.asDiagonal() * vv;
    const Eigen::Index m = chi.cols();
    for (int i = 0; i < 3; ++i) c.segment(sys.dofs.field_offset[ts] + i * m, m) = loc.col(i);
  }
  return c;
}

ManufacturedCase sine_bubble(const Material& m) {
  using std::numbers::pi;
  ManufacturedCase c;
  c.name = "sine";
  c.material = m;
  const double mu = m.mu();
  const double lam = m.lambda();
  // phi = sx sy sz; gradient and Hessian of phi.
  auto grad_phi = [](const Vec3& x) {
    const Vec3 s(std::sin(pi * x(0)), std::sin(pi * x(1)), std::sin(pi * x(2)));
    const Vec3 co(std::cos(pi * x(0)), std::cos(pi * x(1)), std::cos(pi * x(2)));
    return Vec3(pi * co(0) * s(1) * s(2), pi * s(0) * co(1) * s(2), pi * s(0) * s(1) * co(2));
  };
  auto hess_phi = [](const Vec3& x) {
    const Vec3 s(std::sin(pi * x(0)), std::sin(pi * x(1)), std::sin(pi * x(2)));
    const Vec3 co(std::cos(pi * x(0)), std::cos(pi * x(1)), std::cos(pi * x(2)));
    Mat3 h;
    const double p2 = pi * pi;
    h(0, 0) = -p2 * s(0) * s(1) * s(2);
    h(1, 1) = h(0, 0);
    h(2, 2) = h(0, 0);
    h(0, 1) = h(1, 0) = p2 * co(0) * co(1) * s(2);
    h(0, 2) = h(2, 0) = p2 * co(0) * s(1) * co(2);
    h(1, 2) = h(2, 1) = p2 * s(0) * co(1) * co(2);
    return h;
  };
  c.displacement = FieldSample::smooth(3, [](const Vec3& x) {
    const double v = std::sin(pi * x(0)) * std::sin(pi * x(1)) * std::sin(pi * x(2));
    return Eigen::VectorXd(Eigen::Vector3d(v, v, v));
  });
  c.stress = FieldSample::smooth_matrix([=](const Vec3& x) {
    const Vec3 g = grad_phi(x);
    Mat3 du;
    for (int i = 0; i < 3; ++i) du.row(i) = g.transpose();
    return stiffness_apply(m, 0.5 * (du + du.transpose()));
  });
  c.rotation = FieldSample::smooth(3, [=](const Vec3& x) {
    const Vec3 g = grad_phi(x);
    Mat3 du;
    for (int i = 0; i < 3; ++i) du.row(i) = g.transpose();
    return Eigen::VectorXd(vec_of_antisym(0.5 * (du - du.transpose())));
  });
  c.load = FieldSample::smooth(3, [=](const Vec3& x) {
    const Mat3 h = hess_phi(x);
    const double lap = h.trace();
    Eigen::VectorXd f(3);
    for (int i = 0; i < 3; ++i) f(i) = mu * lap + (mu + lam) * h.row(i).sum();
    return f;
  });
  return c;
}

ManufacturedCase constant_stress(const Material& m, const Mat3& s) {
  ManufacturedCase c;
  c.name = "patch";
  c.material = m;
  const Mat3 e = compliance_apply(m, s);
  c.displacement = FieldSample::smooth(3, [e](const Vec3& x) { return Eigen::VectorXd(e * x); });
  c.stress = FieldSample::smooth_matrix([s](const Vec3&) { return s; });
  c.rotation = FieldSample::smooth(3, [](const Vec3&) { return Eigen::VectorXd(Eigen::Vector3d::Zero()); });
  c.load = c.rotation;
  c.boundary_displacement = c.displacement;
  return c;
}

void write_solution(std::ostream& coef, std::ostream& samples, const SimplicialMesh& mesh,
                    const SaddleSolution& sol) {
  coef << std::setprecision(17);
  auto dump = [&](const char* name, const Vector& v) {
    coef << name << ' ' << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) coef << v(i) << '\n';
  };
  dump("sigma", sol.sigma);
  dump("u", sol.u);
  dump("p", sol.p);

  samples << std::setprecision(17);
  samples << "tet,x,y,z,s11,s12,s13,s21,s22,s23,s31,s32,s33,u1,u2,u3,p1,p2,p3\n";
  const Vec3 centroid(0.25, 0.25, 0.25);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const Vec3 x = mesh.affine(t).map(centroid);
    samples << t << ',' << x(0) << ',' << x(1) << ',' << x(2);
    for (const PolySet* p : {&sol.stress.local[ts], &sol.displacement.local[ts], &sol.rotation.local[ts]}) {
      const Eigen::VectorXd v = p->evaluate(0, centroid);
      for (Eigen::Index k = 0; k < v.size(); ++k) samples << ',' << v(k);
    }
    samples << '\n';
  }
}

}  // namespace afw3d
