#pragma once

// Brezzi constants, commuting-diagram residuals and convergence studies.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "afw3d/assembly.hpp"

namespace afw3d {

struct InfSup {
  double beta = 0.0;  // sqrt of the smallest eigenvalue
  double eigenvalue = 0.0;
  int iterations = 0;
  double residual = 0.0;
  int stress_dofs = 0;
  int multiplier_dofs = 0;
};

/// Smallest eigenvalue of B M^{-1} B^T against the L2 Gram of (v, q), with
/// B = [B1; B2] and M the H(div) Gram of the stress space. Throws NoConvergence.
InfSup infsup_constant(const SimplicialMesh& mesh, const OrderMap& r);
InfSup infsup_constant(const BlockSaddleSystem& sys);

struct KernelCoercivity {
  double ratio = 0.0;  // min <A tau, tau> / ||tau||^2_{H(div)} over the kernel
  double bound = 0.0;  // material compliance lower bound
  int kernel_dim = 0;
  double max_div = 0.0;  // largest ||div tau|| / ||tau||_{H(div)} over a kernel basis
};

/// Throws EmptyKernel when B has full column rank.
KernelCoercivity kernel_coercivity(const SimplicialMesh& mesh, const OrderMap& r, const Material& m);
KernelCoercivity kernel_coercivity(const BlockSaddleSystem& sys);

struct DiagramRow {
  int diagram = 0;  // 1, 2, 3
  std::string field;
  double residual = 0.0;  // relative
};

struct DiagramTable {
  std::vector<DiagramRow> rows;
  double max_residual(int diagram) const;
};

/// Residuals of
///   1: div Π² U = Π³ div U,
///   2: Π³ div Π^{2,-} U = Π³ div U,
///   3: Π^{2,-} S1 Π̄^{1,-} W = Π^{2,-} S1 W,
/// for n_samples random polynomial fields of degree r_max + 2 and three fixed
/// transcendental fields.
DiagramTable commuting_diagram_suite(const SimplicialMesh& mesh, const OrderMap& r, int n_samples,
                                     std::uint64_t seed);

/// Random matrix field with analytic gradient: a polynomial of the given
/// degree in physical coordinates.
FieldSample random_polynomial_field(int ncomp, int degree, std::uint64_t seed);
/// Fixed transcendental matrix fields (index 0..2) with analytic gradients.
FieldSample transcendental_field(int index);

struct ConstructionCheck {
  Vector sigma;
  double sigma_hdiv = 0.0;
  double data_norm = 0.0;  // ||omega|| + ||mu||
  double ratio = 0.0;
  double constraint_residual = 0.0;
};

/// Least H(div)-norm stress with div sigma = mu and S2 sigma = omega in the
/// discrete sense (coefficients in the orthonormal P_r̃ bases). Throws
/// InfeasibleConstraints.
ConstructionCheck stability_construction_check(const BlockSaddleSystem& sys, const Vector& omega,
                                               const Vector& mu);

using OrderPolicy = std::function<OrderMap(const SimplicialMesh&)>;
OrderPolicy uniform_policy(int r);
/// Per-tet orders uniform in [lo, hi] from the seed, min rule for faces and edges.
OrderPolicy random_policy(int lo, int hi, std::uint64_t seed);
/// Per-tet orders for the base mesh; on red-refined meshes (8^k times as many
/// tets) every child inherits the order of its ancestor.
OrderPolicy list_policy(std::vector<int> orders);

/// Seeded tet orders in [lo, hi].
std::vector<int> random_orders(int count, int lo, int hi, std::uint64_t seed);

struct ConvergenceRow {
  int level = 0;
  int tets = 0;
  double h = 0.0;
  int dofs = 0;
  ErrorNorms error;
  ErrorNorms best;
  double rate_total = 0.0;  // log(error ratio) / log(h ratio) against the previous level; 0 on level 0
  double rate_u = 0.0;
  double quasi_optimality = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// relative_drift of the quasi-optimality ratio over the levels.
  double ratio_drift() const;
};

/// `base` followed by levels - 1 uniform red refinements.
std::vector<SimplicialMesh> refinement_sequence(const SimplicialMesh& base, int levels);
/// unit_cube_mesh(n) for each n.
std::vector<SimplicialMesh> cube_sequence(const std::vector<int>& ns);

/// Level 0 is `base`; each further level is a uniform red refinement.
ConvergenceReport convergence_study(const ManufacturedCase& c, const OrderPolicy& policy, const SimplicialMesh& base,
                                    int levels);
ConvergenceReport convergence_study(const ManufacturedCase& c, const OrderPolicy& policy,
                                    const std::vector<SimplicialMesh>& meshes);

struct StabilityRow {
  int level = 0;
  int tets = 0;
  double h = 0.0;
  int stress_dofs = 0;
  int multiplier_dofs = 0;
  double beta = 0.0;
  double coercivity = 0.0;
  double bound = 0.0;
  double diagram_max = 0.0;  // max over the three diagrams; 0 if not sampled
};

/// Levels as in convergence_study.
std::vector<StabilityRow> stability_sweep(const SimplicialMesh& base, const OrderPolicy& policy, const Material& m,
                                          int levels, int diagram_samples, std::uint64_t seed);
std::vector<StabilityRow> stability_sweep(const std::vector<SimplicialMesh>& meshes, const OrderPolicy& policy,
                                          const Material& m, int diagram_samples, std::uint64_t seed);

/// (max - min) / max.
double relative_drift(const std::vector<double>& values);

/// Longest edge over the mesh.
double mesh_size(const SimplicialMesh& mesh);

}  // namespace afw3d
