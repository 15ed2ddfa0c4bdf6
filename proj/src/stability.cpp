#include "afw3d/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "afw3d/errors.hpp"

namespace afw3d {

namespace {

DenseMatrix constraint_matrix(const BlockSaddleSystem& sys) {
  DenseMatrix b(sys.dofs.displacement + sys.dofs.rotation, sys.dofs.stress());
  b << DenseMatrix(sys.b1), DenseMatrix(sys.b2);
  return b;
}

BlockSaddleSystem structure_only(const SimplicialMesh& mesh, const OrderMap& r, const Material& m) {
  const FieldSample zero = FieldSample::smooth(3, [](const Vec3&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(3)); });
  return assemble(mesh, r, m, zero);
}

double max_local(const SimplicialMesh& mesh, const std::vector<PolySet>& p) {
  double s = 0.0;
  for (int t = 0; t < mesh.num_tets(); ++t) s = std::max(s, local_l2_norm(mesh, t, p[static_cast<std::size_t>(t)]));
  return s;
}

double relative_residual(const SimplicialMesh& mesh, const std::vector<PolySet>& lhs, const std::vector<PolySet>& rhs) {
  double res = 0.0;
  for (int t = 0; t < mesh.num_tets(); ++t)
    res = std::max(res, local_l2_norm(mesh, t, lhs[static_cast<std::size_t>(t)] - rhs[static_cast<std::size_t>(t)]));
  const double scale = max_local(mesh, rhs);
  return scale > 0.0 ? res / scale : res;
}

std::vector<PolySet> divergences(const SimplicialMesh& mesh, const DiscreteField& f) {
  std::vector<PolySet> out;
  for (int t = 0; t < mesh.num_tets(); ++t) out.push_back(physical_divergence(f.local[static_cast<std::size_t>(t)], mesh.affine(t)));
  return out;
}

}  // namespace

InfSup infsup_constant(const BlockSaddleSystem& sys) {
  const DenseMatrix b = constraint_matrix(sys);
  SparseDirectSolver gram(sys.hdiv_gram());
  const DenseMatrix x = gram.solve(DenseMatrix(b.transpose()));
  DenseMatrix s = b * x;
  s = 0.5 * (s + s.transpose()).eval();
  const DenseMatrix id = DenseMatrix::Identity(s.rows(), s.cols());
  const EigenPair e = sym_generalized_eig_min(s, id);
  InfSup out;
  out.eigenvalue = e.value;
  out.beta = std::sqrt(std::max(e.value, 0.0));
  out.iterations = e.iterations;
  out.residual = e.residual;
  out.stress_dofs = sys.dofs.stress();
  out.multiplier_dofs = static_cast<int>(b.rows());
  return out;
}

InfSup infsup_constant(const SimplicialMesh& mesh, const OrderMap& r) {
  return infsup_constant(structure_only(mesh, r, Material(1.0, 1.0)));
}

KernelCoercivity kernel_coercivity(const BlockSaddleSystem& sys) {
  const DenseMatrix b = constraint_matrix(sys);
  const DenseMatrix n = null_space(b);
  if (n.cols() == 0) throw EmptyKernel("the constraint matrix has full column rank");
  const DenseMatrix m = n.transpose() * (sys.hdiv_gram() * n);
  const DenseMatrix a = n.transpose() * (sys.a * n);
  // B1 gives the coefficients of div tau in an orthonormal basis of the
  // displacement space, which contains div tau.
  const DenseMatrix dv = sys.b1 * n;
  const EigenPair e = sym_generalized_eig_min(DenseMatrix(0.5 * (a + a.transpose())), DenseMatrix(0.5 * (m + m.transpose())));
  KernelCoercivity out;
  out.ratio = e.value;
  out.bound = sys.material.compliance_lower_bound();
  out.kernel_dim = static_cast<int>(n.cols());
  for (Eigen::Index k = 0; k < n.cols(); ++k)
    out.max_div = std::max(out.max_div, dv.col(k).norm() / std::sqrt(m(k, k)));
  return out;
}

KernelCoercivity kernel_coercivity(const SimplicialMesh& mesh, const OrderMap& r, const Material& m) {
  return kernel_coercivity(structure_only(mesh, r, m));
}

double DiagramTable::max_residual(int diagram) const {
  double m = 0.0;
  for (const auto& row : rows)
    if (row.diagram == diagram) m = std::max(m, row.residual);
  return m;
}

FieldSample random_polynomial_field(int ncomp, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  PolySet p(3, ncomp, degree, 1);
  for (Eigen::Index j = 0; j < p.coef().cols(); ++j) p.coef()(0, j) = dist(rng);
  return FieldSample::polynomial(p);
}

FieldSample transcendental_field(int index) {
  // Entry (i, j) is g(k_ij . x + b_ij) for a scalar profile g.
  auto wave = [](int i, int j) { return Vec3(0.7 * (1 + i), 0.5 * (1 + j), 0.3 * (1 + (i + j) % 3)); };
  auto shift = [](int i, int j) { return 0.3 * (i - j) + 0.1; };
  std::function<double(double)> g, dg;
  switch (index % 3) {
    case 0:
      g = [](double s) { return std::sin(s); };
      dg = [](double s) { return std::cos(s); };
      break;
    case 1:
      g = [](double s) { return std::exp(0.5 * s); };
      dg = [](double s) { return 0.5 * std::exp(0.5 * s); };
      break;
    default:
      g = [](double s) { return std::cos(s) * std::exp(-0.25 * s); };
      dg = [](double s) { return -(std::sin(s) + 0.25 * std::cos(s)) * std::exp(-0.25 * s); };
      break;
  }
  return FieldSample::smooth(
      9,
      [=](const Vec3& x) {
        Eigen::VectorXd v(9);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) v(3 * i + j) = g(wave(i, j).dot(x) + shift(i, j));
        return v;
      },
      [=](const Vec3& x) {
        DenseMatrix d(9, 3);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) d.row(3 * i + j) = dg(wave(i, j).dot(x) + shift(i, j)) * wave(i, j).transpose();
        return d;
      });
}

DiagramTable commuting_diagram_suite(const SimplicialMesh& mesh, const OrderMap& r, int n_samples,
                                     std::uint64_t seed) {
  std::vector<std::pair<std::string, FieldSample>> fields;
  for (int k = 0; k < n_samples; ++k)
    fields.emplace_back("poly" + std::to_string(k), random_polynomial_field(9, r.max_order() + 2, seed + static_cast<std::uint64_t>(k)));
  for (int k = 0; k < 3; ++k) fields.emplace_back("smooth" + std::to_string(k), transcendental_field(k));

  DiagramTable table;
  for (const auto& [name, u] : fields) {
    const FieldSample divu = u.divergence();
    const DiscreteField p3 = project_l2_p3(mesh, r, divu);

    const DiscreteField p2 = interp_p2(mesh, r, u);
    table.rows.push_back({1, name, relative_residual(mesh, divergences(mesh, p2), p3.local)});

    const DiscreteField p2m = interp_p2minus_global(mesh, r, u);
    const DiscreteField back = project_l2_p3(mesh, r, FieldSample::piecewise(mesh, divergences(mesh, p2m)));
    table.rows.push_back({2, name, relative_residual(mesh, back.local, p3.local)});

    const DiscreteField bar = interp_p1minus_stabilized(mesh, r, u);
    const DiscreteField lhs = interp_p2minus_global(mesh, r, s1_of(bar.as_field(mesh)));
    const DiscreteField rhs = interp_p2minus_global(mesh, r, s1_of(u));
    table.rows.push_back({3, name, relative_residual(mesh, lhs.local, rhs.local)});
  }
  return table;
}

ConstructionCheck stability_construction_check(const BlockSaddleSystem& sys, const Vector& omega, const Vector& mu) {
  if (omega.size() != sys.dofs.rotation || mu.size() != sys.dofs.displacement)
    throw DimensionMismatch("rotation and displacement data sizes");
  DenseMatrix c(sys.dofs.displacement + sys.dofs.rotation, sys.dofs.stress());
  c << DenseMatrix(sys.b1), -DenseMatrix(sys.b2);
  Vector g(c.rows());
  g << mu, omega;
  SparseDirectSolver gram(sys.hdiv_gram());
  const DenseMatrix x = gram.solve(DenseMatrix(c.transpose()));
  DenseMatrix s = c * x;
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::LDLT<DenseMatrix> ldlt(s);
  ConstructionCheck out;
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= default_tolerances().lu_pivot * std::max(1.0, s.norm()))
    throw InfeasibleConstraints("the divergence and symmetry constraints are not onto");
  const Vector lambda = ldlt.solve(g);
  out.sigma = x * lambda;
  out.constraint_residual = (c * out.sigma - g).norm() / std::max(1.0, g.norm());
  if (out.constraint_residual > default_tolerances().solve_residual)
    throw InfeasibleConstraints("constraint residual " + std::to_string(out.constraint_residual));
  out.sigma_hdiv = std::sqrt(std::max(0.0, out.sigma.dot(sys.hdiv_gram() * out.sigma)));
  out.data_norm = omega.norm() + mu.norm();
  out.ratio = out.data_norm > 0.0 ? out.sigma_hdiv / out.data_norm : 0.0;
  return out;
}

std::vector<int> random_orders(int count, int lo, int hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<int> out(static_cast<std::size_t>(count));
  for (auto& v : out) v = d(rng);
  return out;
}

OrderPolicy uniform_policy(int r) {
  return [r](const SimplicialMesh& m) { return uniform_order(m, r); };
}

OrderPolicy random_policy(int lo, int hi, std::uint64_t seed) {
  return [=](const SimplicialMesh& m) { return order_map_min_rule(m, random_orders(m.num_tets(), lo, hi, seed)); };
}

OrderPolicy list_policy(std::vector<int> orders) {
  return [orders = std::move(orders)](const SimplicialMesh& m) {
    const std::size_t n = static_cast<std::size_t>(m.num_tets());
    std::size_t group = 1;
    while (!orders.empty() && orders.size() * group < n) group *= 8;
    if (orders.size() * group != n)
      throw ConfigError("order list has " + std::to_string(orders.size()) + " entries for " + std::to_string(n) + " tets");
    std::vector<int> tet(n);
    for (std::size_t t = 0; t < n; ++t) tet[t] = orders[t / group];
    return order_map_min_rule(m, tet);
  };
}

double relative_drift(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
}

double ConvergenceReport::ratio_drift() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.quasi_optimality);
  return relative_drift(v);
}

double mesh_size(const SimplicialMesh& mesh) {
  double h = 0.0;
  for (int t = 0; t < mesh.num_tets(); ++t) h = std::max(h, mesh.affine(t).h);
  return h;
}

std::vector<SimplicialMesh> refinement_sequence(const SimplicialMesh& base, int levels) {
  if (levels < 1) throw ConfigError("at least one level is required");
  std::vector<SimplicialMesh> out{base};
  for (int l = 1; l < levels; ++l) out.push_back(refine_uniform(out.back()));
  return out;
}

std::vector<SimplicialMesh> cube_sequence(const std::vector<int>& ns) {
  if (ns.empty()) throw ConfigError("at least one level is required");
  std::vector<SimplicialMesh> out;
  for (int n : ns) out.push_back(unit_cube_mesh(n));
  return out;
}

ConvergenceReport convergence_study(const ManufacturedCase& c, const OrderPolicy& policy, const SimplicialMesh& base,
                                    int levels) {
  return convergence_study(c, policy, refinement_sequence(base, levels));
}

ConvergenceReport convergence_study(const ManufacturedCase& c, const OrderPolicy& policy,
                                    const std::vector<SimplicialMesh>& meshes) {
  if (meshes.empty()) throw ConfigError("at least one level is required");
  ConvergenceReport rep;
  for (std::size_t l = 0; l < meshes.size(); ++l) {
    const SimplicialMesh& mesh = meshes[l];
    const OrderMap r = policy(mesh);
    const BlockSaddleSystem sys = assemble(mesh, r, c);
    const SaddleSolution sol = solve_saddle(mesh, sys);
    ConvergenceRow row;
    row.level = static_cast<int>(l);
    row.tets = mesh.num_tets();
    row.h = mesh_size(mesh);
    row.dofs = sys.dofs.total();
    row.error = error_norms(mesh, sys, sol.stress, sol.displacement, sol.rotation, c);
    const DiscreteField bs = stress_field(sys, hdiv_projection(mesh, sys, c.stress, c.load));
    const DiscreteField bu = elementwise_field(sys, field_projection(mesh, sys, c.displacement), "P_r(V)");
    const DiscreteField bp = elementwise_field(sys, field_projection(mesh, sys, c.rotation), "P_r(V)");
    row.best = error_norms(mesh, sys, bs, bu, bp, c);
    row.quasi_optimality = row.error.total() / row.best.total();
    if (l > 0) {
      const auto& prev = rep.rows.back();
      const double dh = std::log(prev.h / row.h);
      row.rate_total = std::log(prev.error.total() / row.error.total()) / dh;
      row.rate_u = std::log(prev.error.displacement_l2 / row.error.displacement_l2) / dh;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<StabilityRow> stability_sweep(const SimplicialMesh& base, const OrderPolicy& policy, const Material& m,
                                          int levels, int diagram_samples, std::uint64_t seed) {
  return stability_sweep(refinement_sequence(base, levels), policy, m, diagram_samples, seed);
}

std::vector<StabilityRow> stability_sweep(const std::vector<SimplicialMesh>& meshes, const OrderPolicy& policy,
                                          const Material& m, int diagram_samples, std::uint64_t seed) {
  std::vector<StabilityRow> rows;
  for (std::size_t l = 0; l < meshes.size(); ++l) {
    const SimplicialMesh& mesh = meshes[l];
    const OrderMap r = policy(mesh);
    const BlockSaddleSystem sys = structure_only(mesh, r, m);
    StabilityRow row;
    row.level = static_cast<int>(l);
    row.tets = mesh.num_tets();
    row.h = mesh_size(mesh);
    const InfSup is = infsup_constant(sys);
    row.stress_dofs = is.stress_dofs;
    row.multiplier_dofs = is.multiplier_dofs;
    row.beta = is.beta;
    const KernelCoercivity kc = kernel_coercivity(sys);
    row.coercivity = kc.ratio;
    row.bound = kc.bound;
    if (diagram_samples > 0) {
      const DiagramTable t = commuting_diagram_suite(mesh, r, diagram_samples, seed);
      row.diagram_max = std::max({t.max_residual(1), t.max_residual(2), t.max_residual(3)});
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace afw3d
