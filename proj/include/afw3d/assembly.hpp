#pragma once

// Discrete three-field elasticity system with weakly imposed symmetry.
//
// Stress rows lie in the variable-order BDM space P_{r̃+1}Λ²; displacement
// and rotation are discontinuous P_{r̃}. Stress dofs are moments of the normal
// trace against an orthonormal basis of P_{r̃(F)+1}(F) in the parameter of the
// sorted face vertices, taken with the global face normal, so adjacent tets
// see identical face functionals. Interior dofs are reference moments against
// the bubble space. Displacement and rotation bases are L2-orthonormal on each
// tet.

#include <optional>
#include <string>
#include <vector>

#include "afw3d/fields.hpp"
#include "afw3d/interp.hpp"
#include "afw3d/linalg.hpp"
#include "afw3d/mesh.hpp"
#include "afw3d/tensor_ops.hpp"

namespace afw3d {

struct DofMap {
  int scalar_stress = 0;  // Ns; matrix stress id = row * Ns + scalar id
  int displacement = 0;
  int rotation = 0;
  std::vector<int> face_offset;  // per mesh face
  std::vector<int> face_count;
  std::vector<int> interior_offset;  // per tet
  std::vector<int> interior_count;
  /// Scalar global id of every local nodal function (face dofs of local
  /// faces 0..3, then interior dofs).
  std::vector<std::vector<int>> stress_local;
  /// First displacement (= rotation) id of a tet; component i, basis m at
  /// offset + i * dim P_r̃(T) + m.
  std::vector<int> field_offset;
  std::vector<int> field_dim;  // dim P_r̃(T)
  std::vector<OrderSignature> signature;

  int stress() const { return 3 * scalar_stress; }
  int total() const { return stress() + displacement + rotation; }
};

/// Throws NonMonotoneOrder.
DofMap build_dof_map(const SimplicialMesh& mesh, const OrderMap& r);

/// Nodal stress basis of one tet: reference-coordinate polynomials with
/// physical vector values (contravariant Piola of the reference basis).
struct ElementBasis {
  PolySet psi;            // 3 components, one member per local nodal function
  PolySet field_basis;    // P_r̃ orthonormal on the physical tet, 1 component
};

ElementBasis element_basis(const SimplicialMesh& mesh, const DofMap& dofs, int tet);

struct BlockSaddleSystem {
  DofMap dofs;
  Material material{1.0, 1.0};
  SparseMatrix a;       // <A sigma, tau>
  SparseMatrix b1;      // <div tau, v>
  SparseMatrix b2;      // -<S2 tau, q>
  SparseMatrix mass;    // <sigma, tau>
  SparseMatrix divdiv;  // <div sigma, div tau>
  Vector rhs_stress;    // <tau n, g> on the boundary
  Vector rhs_disp;      // <f, v>
  std::vector<ElementBasis> elements;

  SparseMatrix matrix() const;
  Vector rhs() const;
  /// H(div) Gram matrix of the stress space.
  SparseMatrix hdiv_gram() const { return mass + divdiv; }
};

/// Exact solution data on the unit cube.
struct ManufacturedCase {
  std::string name;
  Material material{1.0, 1.0};
  FieldSample displacement;  // 3 components
  FieldSample stress;        // 9 components
  FieldSample rotation;      // vec of the skew part of grad u
  FieldSample load;          // f = div sigma
  std::optional<FieldSample> boundary_displacement;
};

/// u = sin(pi x) sin(pi y) sin(pi z) (1, 1, 1); zero on the cube boundary.
ManufacturedCase sine_bubble(const Material& m);
/// Constant symmetric stress s with f = 0 and u = (A s) x on the boundary.
ManufacturedCase constant_stress(const Material& m, const Mat3& s);

BlockSaddleSystem assemble(const SimplicialMesh& mesh, const OrderMap& r, const Material& material,
                           const FieldSample& load, const std::optional<FieldSample>& boundary = std::nullopt);
BlockSaddleSystem assemble(const SimplicialMesh& mesh, const OrderMap& r, const ManufacturedCase& c);

struct SaddleSolution {
  Vector sigma;
  Vector u;
  Vector p;
  DiscreteField stress;
  DiscreteField displacement;
  DiscreteField rotation;
  double residual = 0.0;  // relative algebraic residual
};

/// Sparse direct solve; throws FactorizationBreakdown if the relative
/// residual exceeds the solve tolerance.
SaddleSolution solve_saddle(const SimplicialMesh& mesh, const BlockSaddleSystem& sys);

/// Discrete fields from coefficient vectors.
DiscreteField stress_field(const BlockSaddleSystem& sys, const Vector& sigma);
DiscreteField elementwise_field(const BlockSaddleSystem& sys, const Vector& coef, const std::string& space);

struct ErrorNorms {
  double stress_l2 = 0.0;
  double stress_div = 0.0;  // ||div(sigma - sigma_h)||
  double stress_hdiv = 0.0;
  double displacement_l2 = 0.0;
  double rotation_l2 = 0.0;

  double total() const { return stress_hdiv + displacement_l2 + rotation_l2; }
};

/// Quadrature degree 0 picks max(2 r_max + 4, field degree).
ErrorNorms error_norms(const SimplicialMesh& mesh, const BlockSaddleSystem& sys, const DiscreteField& stress,
                       const DiscreteField& displacement, const DiscreteField& rotation, const ManufacturedCase& c,
                       int degree = 0);

/// H(div) projection of the exact stress onto the discrete stress space.
Vector hdiv_projection(const SimplicialMesh& mesh, const BlockSaddleSystem& sys, const FieldSample& sigma,
                       const FieldSample& div_sigma);

/// L2 projection onto the elementwise P_r̃ vector space, as coefficients in
/// the orthonormal displacement basis.
Vector field_projection(const SimplicialMesh& mesh, const BlockSaddleSystem& sys, const FieldSample& v);

/// Plain-text coefficient dump and a CSV of sampled values at tet centroids.
void write_solution(std::ostream& coef, std::ostream& samples, const SimplicialMesh& mesh,
                    const SaddleSolution& sol);

}  // namespace afw3d
