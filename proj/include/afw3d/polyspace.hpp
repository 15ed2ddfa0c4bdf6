#pragma once

// Bases of the polynomial spaces on the reference tetrahedron T̂ with
// vertices 0, e1, e2, e3.
//
// Local numbering: face i is opposite vertex i; edges are
// (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
//
// Every basis is L2(T̂)-orthonormal. Vector-valued spaces (Λ², Λ¹) are
// returned with ncomp = 3; `row_copies` turns such a basis into the
// matrix-valued space whose rows lie in it (member row * n + j has row `row`
// equal to member j).

#include <array>
#include <string>
#include <vector>

#include "afw3d/polynomial.hpp"

namespace afw3d {

enum class SpaceTag {
  P_L3,   // P_r, scalar
  P_L2,   // P_r(T; V), normal traces constrained (BDM type)
  PM_L2,  // P_{r-1}(T; V) + x P_{r-1}(T) (RT type)
  PM_L1,  // P_{r-1}(T; V) + x × P_{r-1}(T; V) (Nédélec first kind)
  P_L1,   // P_r(T; V), tangential traces constrained
};

std::string to_string(SpaceTag tag);

struct OrderSignature {
  int tet = 0;
  std::array<int, 4> face{};
  std::array<int, 6> edge{};

  static OrderSignature uniform(int r);
  /// Every entry shifted by s (edges included).
  OrderSignature shifted(int s) const;
  /// True iff edge <= face <= tet on all incidences.
  bool monotone() const;
  auto operator<=>(const OrderSignature&) const = default;
};

std::string to_string(const OrderSignature& sig);

/// Vertex ids of local face f and local edge e.
const std::array<int, 3>& face_vertices(int f);
const std::array<int, 2>& edge_vertices(int e);
bool edge_in_face(int e, int f);

/// Vertices of the reference tetrahedron.
Vec3 reference_vertex(int v);

/// Orthonormal frame of a reference face. Coordinates y on the face satisfy
/// x = origin + y1 t1 + y2 t2; n = t1 × t2.
struct FaceFrame {
  int face = 0;
  Vec3 origin;
  Vec3 t1;
  Vec3 t2;
  Vec3 n;
};
const FaceFrame& face_frame(int f);

struct PolyBasis {
  SpaceTag tag = SpaceTag::P_L3;
  OrderSignature order;
  PolySet fields;

  Eigen::Index size() const { return fields.size(); }
};

PolyBasis basis_full(SpaceTag tag, int r);
/// Subspace of basis_full(tag, sig.tet) with the face and edge trace
/// constraints of sig. Throws NonMonotoneOrder.
PolyBasis basis_variable(SpaceTag tag, const OrderSignature& sig);
/// Subspace of basis_full(tag, r) with vanishing traces (normal for the Λ²
/// spaces, tangential for the Λ¹ spaces, values for P_L3).
PolyBasis basis_ring(SpaceTag tag, int r);
/// Divergence-free members of basis_ring(P_L2, r).
PolyBasis basis_ring_div_free(int r);

/// Matrix-valued basis of curl P̊_{r+1}Λ¹(T̂; V); dimension (2r+5) r (r-1) / 2.
PolyBasis curl_image_basis(int r);
/// Matrix-valued L2 complement of grad P_r(T̂; V) in P_{r-1}(T̂; M).
PolyBasis complement_g_basis(int r);

/// Matrix-valued space with rows in the vector-valued space p.
PolySet row_copies(const PolySet& p);

enum class DiffOp { Grad, Curl, Div };
PolySet differentiate(const PolySet& p, DiffOp op);

enum class TraceKind { Normal, TangentialFace, TangentialEdge };
/// Trace of vector fields on a reference face (2 variables, face frame
/// coordinates) or edge (1 variable, arclength from the first vertex).
/// Normal: 1 component ω·n; TangentialFace: 2 components (ω·t1, ω·t2);
/// TangentialEdge: 1 component ω·t.
PolySet trace(const PolySet& p, int subsimplex, TraceKind kind);

/// Analytic dimension of P_r(T).
int dim_p(int r);
/// (2r+5) r (r-1) / 2.
int curl_image_dim(int r);

}  // namespace afw3d
