#pragma once

// Tetrahedral simplicial complexes.
//
// Tets store their vertex ids in ascending order; local vertex i of a tet is
// its i-th smallest vertex. Local face i is opposite local vertex i and local
// edges follow the reference numbering (0,1),(0,2),(0,3),(1,2),(1,3),(2,3), so
// the affine map of a tet sends reference subsimplexes to the local ones with
// matching vertex order. Faces and edges are numbered lexicographically by
// their sorted vertex tuples.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "afw3d/polyspace.hpp"
#include "afw3d/tensor_ops.hpp"

namespace afw3d {

/// x = A x̂ + b from the reference tetrahedron onto a mesh tet.
struct AffineMap {
  Mat3 a;
  Vec3 b;
  double det = 0.0;
  Mat3 ainv;
  double h = 0.0;    // outer diameter (longest edge)
  double rho = 0.0;  // inradius

  Vec3 map(const Vec3& xhat) const { return a * xhat + b; }
  Vec3 pull(const Vec3& x) const { return ainv * (x - b); }
};

class SimplicialMesh {
 public:
  SimplicialMesh() = default;

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_tets() const { return static_cast<int>(tets_.size()); }

  const Vec3& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::array<int, 4>& tet(int t) const { return tets_[static_cast<std::size_t>(t)]; }
  const std::vector<std::array<int, 4>>& tets() const { return tets_; }
  const std::array<int, 3>& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }
  const std::array<int, 2>& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  const std::array<int, 4>& tet_faces(int t) const { return tet_faces_[static_cast<std::size_t>(t)]; }
  const std::array<int, 6>& tet_edges(int t) const { return tet_edges_[static_cast<std::size_t>(t)]; }
  const std::array<int, 3>& face_edges(int f) const { return face_edges_[static_cast<std::size_t>(f)]; }
  /// Incident tets of a face; second entry -1 on the boundary.
  const std::array<int, 2>& face_tets(int f) const { return face_tets_[static_cast<std::size_t>(f)]; }
  bool is_boundary_face(int f) const { return face_tets(f)[1] < 0; }
  /// +1 if the outward normal of tet t on its local face i equals face_normal.
  int face_orientation(int t, int i) const { return face_sign_[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]; }

  /// Unit normal (w1 - w0) × (w2 - w0) / |.| of the sorted face vertices.
  Vec3 face_normal(int f) const;
  double face_area(int f) const;
  double volume(int t) const;
  const AffineMap& affine(int t) const { return affine_[static_cast<std::size_t>(t)]; }

  friend SimplicialMesh build_complex(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 4>> tet_faces_;
  std::vector<std::array<int, 6>> tet_edges_;
  std::vector<std::array<int, 3>> face_edges_;
  std::vector<std::array<int, 2>> face_tets_;
  std::vector<std::array<int, 4>> face_sign_;
  std::vector<AffineMap> affine_;
};

/// Throws DegenerateTet (volume <= 1e-14 h^3) or NonManifoldFace.
SimplicialMesh build_complex(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

/// [0,1]^3 split into n^3 cubes of 6 Kuhn tets each.
SimplicialMesh unit_cube_mesh(int n);

/// Red refinement: 8 children per tet, the inner octahedron split along its
/// shortest diagonal. New vertex ids are num_vertices() + edge id.
SimplicialMesh refine_uniform(const SimplicialMesh& m);

/// Max h_T / rho_T over the mesh.
double shape_ratio(const SimplicialMesh& m);

struct OrderMap {
  std::vector<int> tet;
  std::vector<int> face;
  std::vector<int> edge;

  int max_order() const;
};

OrderMap uniform_order(const SimplicialMesh& m, int r);
/// Face and edge orders are the minimum over the adjacent tets.
OrderMap order_map_min_rule(const SimplicialMesh& m, const std::vector<int>& tet_orders);

struct OrderViolation {
  std::string kind;  // "face>tet" or "edge>face"
  int lower_id = 0;  // the smaller subsimplex
  int upper_id = 0;  // the containing one
  int lower_order = 0;
  int upper_order = 0;
};

struct OrderReport {
  bool ok = true;
  std::vector<OrderViolation> violations;
};

OrderReport validate_order_map(const SimplicialMesh& m, const OrderMap& r);

/// Local order signature of tet t, in reference numbering.
OrderSignature signature_of(const SimplicialMesh& m, const OrderMap& r, int t);

// ---------------------------------------------------------------- file I/O --

struct MeshFile {
  SimplicialMesh mesh;
  std::optional<std::vector<int>> orders;
};

/// "afw3d-mesh v1" text format; doubles are written in shortest round-trip form.
void write_mesh(std::ostream& os, const SimplicialMesh& m, const std::vector<int>* orders = nullptr);
MeshFile read_mesh(std::istream& is);
MeshFile read_mesh_file(const std::string& path);

}  // namespace afw3d
