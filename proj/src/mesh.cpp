#include "afw3d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "afw3d/errors.hpp"

namespace afw3d {

namespace {

AffineMap make_affine(const std::array<Vec3, 4>& p) {
  AffineMap m;
  m.b = p[0];
  for (int k = 0; k < 3; ++k) m.a.col(k) = p[static_cast<std::size_t>(k) + 1] - p[0];
  m.det = m.a.determinant();
  m.ainv = m.a.inverse();
  double h = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) h = std::max(h, (p[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(j)]).norm());
  m.h = h;
  double area = 0.0;
  for (int f = 0; f < 4; ++f) {
    const auto& fv = face_vertices(f);
    area += 0.5 * (p[static_cast<std::size_t>(fv[1])] - p[static_cast<std::size_t>(fv[0])])
                      .cross(p[static_cast<std::size_t>(fv[2])] - p[static_cast<std::size_t>(fv[0])])
                      .norm();
  }
  m.rho = 3.0 * (std::abs(m.det) / 6.0) / area;
  return m;
}

}  // namespace

Vec3 SimplicialMesh::face_normal(int f) const {
  const auto& w = face(f);
  return (vertex(w[1]) - vertex(w[0])).cross(vertex(w[2]) - vertex(w[0])).normalized();
}

double SimplicialMesh::face_area(int f) const {
  const auto& w = face(f);
  return 0.5 * (vertex(w[1]) - vertex(w[0])).cross(vertex(w[2]) - vertex(w[0])).norm();
}

double SimplicialMesh::volume(int t) const { return std::abs(affine(t).det) / 6.0; }

SimplicialMesh build_complex(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets) {
  SimplicialMesh m;
  const int nv = static_cast<int>(vertices.size());
  for (auto& t : tets) {
    for (int v : t)
      if (v < 0 || v >= nv) throw MeshFormatError("tet references vertex " + std::to_string(v));
    std::sort(t.begin(), t.end());
    if (std::adjacent_find(t.begin(), t.end()) != t.end()) throw DegenerateTet("repeated vertex in tet");
  }
  m.vertices_ = std::move(vertices);
  m.tets_ = std::move(tets);

  std::map<std::array<int, 3>, int> face_ids;
  std::map<std::array<int, 2>, int> edge_ids;
  for (const auto& t : m.tets_) {
    for (int f = 0; f < 4; ++f) {
      const auto& fv = face_vertices(f);
      face_ids.emplace(std::array<int, 3>{t[static_cast<std::size_t>(fv[0])], t[static_cast<std::size_t>(fv[1])],
                                          t[static_cast<std::size_t>(fv[2])]},
                       0);
    }
    for (int e = 0; e < 6; ++e) {
      const auto& ev = edge_vertices(e);
      edge_ids.emplace(std::array<int, 2>{t[static_cast<std::size_t>(ev[0])], t[static_cast<std::size_t>(ev[1])]}, 0);
    }
  }
  for (auto& [key, id] : face_ids) {
    id = static_cast<int>(m.faces_.size());
    m.faces_.push_back(key);
  }
  for (auto& [key, id] : edge_ids) {
    id = static_cast<int>(m.edges_.size());
    m.edges_.push_back(key);
  }

  m.face_tets_.assign(m.faces_.size(), {-1, -1});
  m.face_edges_.resize(m.faces_.size());
  for (std::size_t f = 0; f < m.faces_.size(); ++f) {
    const auto& w = m.faces_[f];
    m.face_edges_[f] = {edge_ids.at({w[0], w[1]}), edge_ids.at({w[0], w[2]}), edge_ids.at({w[1], w[2]})};
  }

  const int nt = m.num_tets();
  m.tet_faces_.resize(static_cast<std::size_t>(nt));
  m.tet_edges_.resize(static_cast<std::size_t>(nt));
  m.face_sign_.resize(static_cast<std::size_t>(nt));
  m.affine_.resize(static_cast<std::size_t>(nt));
  for (int ti = 0; ti < nt; ++ti) {
    const auto& t = m.tets_[static_cast<std::size_t>(ti)];
    std::array<Vec3, 4> p;
    for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i)] = m.vertex(t[static_cast<std::size_t>(i)]);
    AffineMap am = make_affine(p);
    if (std::abs(am.det) / 6.0 <= default_tolerances().degenerate_volume * am.h * am.h * am.h) {
      throw DegenerateTet("tet " + std::to_string(ti) + " has volume " + std::to_string(std::abs(am.det) / 6.0));
    }
    m.affine_[static_cast<std::size_t>(ti)] = am;
    for (int f = 0; f < 4; ++f) {
      const auto& fv = face_vertices(f);
      const int fid = face_ids.at({t[static_cast<std::size_t>(fv[0])], t[static_cast<std::size_t>(fv[1])],
                                   t[static_cast<std::size_t>(fv[2])]});
      m.tet_faces_[static_cast<std::size_t>(ti)][static_cast<std::size_t>(f)] = fid;
      auto& ft = m.face_tets_[static_cast<std::size_t>(fid)];
      if (ft[0] < 0) ft[0] = ti;
      else if (ft[1] < 0) ft[1] = ti;
      else throw NonManifoldFace("face " + std::to_string(fid) + " is shared by more than two tets");
      const Vec3 centroid = (p[static_cast<std::size_t>(fv[0])] + p[static_cast<std::size_t>(fv[1])] +
                             p[static_cast<std::size_t>(fv[2])]) /
                            3.0;
      const double s = m.face_normal(fid).dot(centroid - p[static_cast<std::size_t>(f)]);
      m.face_sign_[static_cast<std::size_t>(ti)][static_cast<std::size_t>(f)] = s > 0 ? 1 : -1;
    }
    for (int e = 0; e < 6; ++e) {
      const auto& ev = edge_vertices(e);
      m.tet_edges_[static_cast<std::size_t>(ti)][static_cast<std::size_t>(e)] =
          edge_ids.at({t[static_cast<std::size_t>(ev[0])], t[static_cast<std::size_t>(ev[1])]});
    }
  }
  return m;
}

SimplicialMesh unit_cube_mesh(int n) {
  if (n < 1) throw ConfigError("unit_cube_mesh needs n >= 1");
  const int m = n + 1;
  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>(m * m * m));
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) verts.emplace_back(double(i) / n, double(j) / n, double(k) / n);
  auto id = [m](int i, int j, int k) { return i + m * j + m * m * k; };
  std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  tets.reserve(static_cast<std::size_t>(6 * n * n * n));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t;
          t[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            c[static_cast<std::size_t>(p[static_cast<std::size_t>(s)])] += 1;
            t[static_cast<std::size_t>(s) + 1] = id(c[0], c[1], c[2]);
          }
          tets.push_back(t);
        }
  return build_complex(std::move(verts), std::move(tets));
}

SimplicialMesh refine_uniform(const SimplicialMesh& m) {
  std::vector<Vec3> verts = m.vertices();
  const int nv = m.num_vertices();
  for (int e = 0; e < m.num_edges(); ++e) verts.push_back(0.5 * (m.vertex(m.edge(e)[0]) + m.vertex(m.edge(e)[1])));
  std::vector<std::array<int, 4>> tets;
  tets.reserve(static_cast<std::size_t>(8 * m.num_tets()));
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto& v = m.tet(t);
    const auto& te = m.tet_edges(t);
    // mid(i, j): vertex id of the midpoint of local edge (i, j).
    auto mid = [&](int i, int j) {
      if (i > j) std::swap(i, j);
      for (int e = 0; e < 6; ++e) {
        const auto& ev = edge_vertices(e);
        if (ev[0] == i && ev[1] == j) return nv + te[static_cast<std::size_t>(e)];
      }
      return -1;
    };
    tets.push_back({v[0], mid(0, 1), mid(0, 2), mid(0, 3)});
    tets.push_back({mid(0, 1), v[1], mid(1, 2), mid(1, 3)});
    tets.push_back({mid(0, 2), mid(1, 2), v[2], mid(2, 3)});
    tets.push_back({mid(0, 3), mid(1, 3), mid(2, 3), v[3]});
    // Inner octahedron: split along the shortest of its three diagonals
    // (m_ij, m_kl); the ring around it is m_ik, m_il, m_jl, m_jk.
    const std::array<std::array<int, 4>, 3> diag{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
    int best = 0;
    double best_len = 0.0;
    for (int d = 0; d < 3; ++d) {
      const auto& q = diag[static_cast<std::size_t>(d)];
      const double len = (verts[static_cast<std::size_t>(mid(q[0], q[1]))] - verts[static_cast<std::size_t>(mid(q[2], q[3]))]).norm();
      if (d == 0 || len < best_len * (1.0 - 1e-12)) {
        best = d;
        best_len = len;
      }
    }
    const auto& q = diag[static_cast<std::size_t>(best)];
    const int a = mid(q[0], q[1]);
    const int b = mid(q[2], q[3]);
    const std::array<int, 4> ring{mid(q[0], q[2]), mid(q[0], q[3]), mid(q[1], q[3]), mid(q[1], q[2])};
    for (int s = 0; s < 4; ++s) tets.push_back({a, b, ring[static_cast<std::size_t>(s)], ring[static_cast<std::size_t>((s + 1) % 4)]});
  }
  return build_complex(std::move(verts), std::move(tets));
}

double shape_ratio(const SimplicialMesh& m) {
  double r = 0.0;
  for (int t = 0; t < m.num_tets(); ++t) r = std::max(r, m.affine(t).h / m.affine(t).rho);
  return r;
}

// ------------------------------------------------------------- order maps --

int OrderMap::max_order() const {
  int r = 0;
  for (int v : tet) r = std::max(r, v);
  return r;
}

OrderMap uniform_order(const SimplicialMesh& m, int r) {
  return order_map_min_rule(m, std::vector<int>(static_cast<std::size_t>(m.num_tets()), r));
}

OrderMap order_map_min_rule(const SimplicialMesh& m, const std::vector<int>& tet_orders) {
  if (static_cast<int>(tet_orders.size()) != m.num_tets()) {
    throw DimensionMismatch("order list has " + std::to_string(tet_orders.size()) + " entries for " +
                            std::to_string(m.num_tets()) + " tets");
  }
  OrderMap r;
  r.tet = tet_orders;
  const int big = std::numeric_limits<int>::max();
  r.face.assign(static_cast<std::size_t>(m.num_faces()), big);
  r.edge.assign(static_cast<std::size_t>(m.num_edges()), big);
  for (int t = 0; t < m.num_tets(); ++t) {
    const int o = tet_orders[static_cast<std::size_t>(t)];
    if (o < 0) throw NonMonotoneOrder("negative order on tet " + std::to_string(t));
    for (int f : m.tet_faces(t)) r.face[static_cast<std::size_t>(f)] = std::min(r.face[static_cast<std::size_t>(f)], o);
    for (int e : m.tet_edges(t)) r.edge[static_cast<std::size_t>(e)] = std::min(r.edge[static_cast<std::size_t>(e)], o);
  }
  return r;
}

OrderReport validate_order_map(const SimplicialMesh& m, const OrderMap& r) {
  OrderReport rep;
  for (int t = 0; t < m.num_tets(); ++t)
    for (int f : m.tet_faces(t))
      if (r.face[static_cast<std::size_t>(f)] > r.tet[static_cast<std::size_t>(t)])
        rep.violations.push_back({"face>tet", f, t, r.face[static_cast<std::size_t>(f)], r.tet[static_cast<std::size_t>(t)]});
  for (int f = 0; f < m.num_faces(); ++f)
    for (int e : m.face_edges(f))
      if (r.edge[static_cast<std::size_t>(e)] > r.face[static_cast<std::size_t>(f)])
        rep.violations.push_back({"edge>face", e, f, r.edge[static_cast<std::size_t>(e)], r.face[static_cast<std::size_t>(f)]});
  rep.ok = rep.violations.empty();
  return rep;
}

OrderSignature signature_of(const SimplicialMesh& m, const OrderMap& r, int t) {
  OrderSignature s;
  s.tet = r.tet[static_cast<std::size_t>(t)];
  for (int f = 0; f < 4; ++f) s.face[static_cast<std::size_t>(f)] = r.face[static_cast<std::size_t>(m.tet_faces(t)[static_cast<std::size_t>(f)])];
  for (int e = 0; e < 6; ++e) s.edge[static_cast<std::size_t>(e)] = r.edge[static_cast<std::size_t>(m.tet_edges(t)[static_cast<std::size_t>(e)])];
  return s;
}

}  // namespace afw3d
