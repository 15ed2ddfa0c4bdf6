#pragma once

// Projection and interpolation operators.
//
// Element operators work on the reference tetrahedron and are transported
// to a mesh tet with x = A x̂ + b by
//   U(x) = A^{-T} Û(x̂) A^T   (Π^{2,-}, Π²),
//   W(x) = A Ŵ(x̂) A^{-1}     (Π^{1,-}).
// A second route evaluates the moment conditions directly on the physical
// tet; both give the same operator.

#include <memory>
#include <string>
#include <vector>

#include "afw3d/fields.hpp"
#include "afw3d/linalg.hpp"
#include "afw3d/mesh.hpp"
#include "afw3d/polyspace.hpp"

namespace afw3d {

enum class MomentKind {
  TwoMinus,  // Π^{2,-}: onto P⁻_{r̃+1}Λ²(T; V)
  OneMinus,  // Π^{1,-}: into P⁻_{r̃+2}Λ¹(T; V) with zero edge traces
  Full2,     // Π²: onto P_{r̃+1}Λ²(T; V)
};

std::string to_string(MomentKind kind);

struct MomentSystem {
  MomentKind kind = MomentKind::TwoMinus;
  OrderSignature order;
  double t = 0.0;
  /// Matrix-valued basis of the target space (the columns of c).
  PolySet target;
  /// Rows: face moments, divergence moments, auxiliary moments.
  DenseMatrix c;
  int face_rows = 0;
  int div_rows = 0;
  int aux_rows = 0;
};

/// Throws DimensionMismatch if the system is not square.
MomentSystem build_moment_system_2minus(const OrderSignature& sig, double t);
MomentSystem build_moment_system_1minus(const OrderSignature& sig, double t);
MomentSystem build_moment_system_full2(const OrderSignature& sig);

/// Score of C: mean over rows of log|pivot| after scaling each row to unit
/// max-norm; -inf if singular.
double equilibrated_log_det(const DenseMatrix& c);

struct TSelection {
  double t = 0.0;
  int grid_index = 0;
  double score = 0.0;
};

/// t on the grid j/64 maximizing the smaller score of the uniform-order
/// Π^{2,-} and Π^{1,-} systems for tet order r. Cached. Throws NoAdmissibleT.
TSelection select_t_detail(int r);
double select_t(int r);

/// Result of an element operator: reference coefficients and the local
/// polynomial in reference coordinates with physical component values.
struct LocalResult {
  Vector coef;
  PolySet field;
};

LocalResult interp_p2minus(const SimplicialMesh& mesh, int tet, const OrderSignature& sig, const FieldSample& u);
LocalResult interp_p1minus(const SimplicialMesh& mesh, int tet, const OrderSignature& sig, const FieldSample& w);
LocalResult interp_p2_local(const SimplicialMesh& mesh, int tet, const OrderSignature& sig, const FieldSample& u);

/// Same operators from moments assembled on the physical tet.
LocalResult interp_p2minus_physical(const SimplicialMesh& mesh, int tet, const OrderSignature& sig,
                                    const FieldSample& u);
LocalResult interp_p1minus_physical(const SimplicialMesh& mesh, int tet, const OrderSignature& sig,
                                    const FieldSample& w);

/// Per-tet polynomial field with the coefficients that produced it.
struct DiscreteField {
  std::string space;
  std::vector<Vector> coef;
  std::vector<PolySet> local;

  FieldSample as_field(const SimplicialMesh& mesh) const;
};

/// Elementwise L2 projection onto P_{r̃(T)}(T) per component.
DiscreteField project_l2_p3(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& f);
DiscreteField interp_p2(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& u);
DiscreteField interp_p2minus_global(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& u);
DiscreteField interp_p1minus_global(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& w);
/// Continuous piecewise linear R_h W from patch averages at the vertices.
DiscreteField clement(const SimplicialMesh& mesh, const FieldSample& w);
/// Π^{1,-}(I - R_h) + R_h.
DiscreteField interp_p1minus_stabilized(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& w);

enum class Continuity { Normal, Tangential };

/// Largest interface jump of the normal (rows of U n) or tangential (U t)
/// trace over interior face quadrature points.
double interface_jump(const SimplicialMesh& mesh, const DiscreteField& f, Continuity kind);

/// Collects element results into a field; throws ConformityViolation if the
/// interface jump exceeds tol * max(1, field scale).
DiscreteField elementwise_to_global(const SimplicialMesh& mesh, std::vector<LocalResult> parts, Continuity kind,
                                    const std::string& space, double tol = default_tolerances().conformity);

/// L2(T) norm of a local polynomial on tet t.
double local_l2_norm(const SimplicialMesh& mesh, int tet, const PolySet& p);

}  // namespace afw3d
