#include "afw3d/polyspace.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "afw3d/errors.hpp"

namespace afw3d {

namespace {

constexpr std::array<std::array<int, 3>, 4> kFaces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};
constexpr std::array<std::array<int, 2>, 6> kEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Vector monomial spanning set of P_r(T; V), degree frame r.
PolySet vector_monomials(int r) {
  const int n = frame_size(3, r);
  PolySet out(3, 3, r, 3 * n);
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < n; ++j) out.coef()(c * n + j, c * n + j) = 1.0;
  return out;
}

PolySet scalar_monomials(int r) {
  const int n = frame_size(3, r);
  return PolySet(3, 1, r, DenseMatrix(DenseMatrix::Identity(n, n)));
}

// Coefficients (per member) of all monomials of p with total degree in
// [lo, p.degree()], as rows of a constraint matrix (constraints x members).
DenseMatrix high_degree_rows(const PolySet& p, int lo) {
  const auto& ex = frame_exponents(p.vars(), p.degree());
  std::vector<Eigen::Index> cols;
  for (int c = 0; c < p.ncomp(); ++c)
    for (std::size_t j = 0; j < ex.size(); ++j)
      if (ex[j][0] + ex[j][1] + ex[j][2] >= lo)
        cols.push_back(static_cast<Eigen::Index>(c) * p.frame() + static_cast<Eigen::Index>(j));
  DenseMatrix g(static_cast<Eigen::Index>(cols.size()), p.size());
  for (std::size_t k = 0; k < cols.size(); ++k) g.row(static_cast<Eigen::Index>(k)) = p.coef().col(cols[k]).transpose();
  return g;
}

// Homogeneous part of degree d.
PolySet homogeneous_part(const PolySet& p, int d) {
  PolySet out = p;
  const auto& ex = frame_exponents(p.vars(), p.degree());
  for (int c = 0; c < p.ncomp(); ++c)
    for (std::size_t j = 0; j < ex.size(); ++j)
      if (ex[j][0] + ex[j][1] + ex[j][2] != d) out.component(c).col(static_cast<Eigen::Index>(j)).setZero();
  return out;
}

// Tangential face trace (2 components) lies in P_{s-1}(F;R²) + y⊥ P_{s-1}(F),
// y⊥ = (y2, -y1), which is the exact tangential trace of P⁻_sΛ¹(T).
DenseMatrix trimmed_face_rows(const PolySet& tr, int s) {
  if (s <= 0) return high_degree_rows(tr, 0);
  DenseMatrix above = high_degree_rows(tr, s + 1);
  const PolySet h = homogeneous_part(tr, s);
  const PolySet a = map_components(h, DenseMatrix{{1.0, 0.0}});
  const PolySet b = map_components(h, DenseMatrix{{0.0, 1.0}});
  const PolySet mix = times_coordinate(a, 0) + times_coordinate(b, 1);
  DenseMatrix hom = high_degree_rows(mix, 0);
  DenseMatrix g(above.rows() + hom.rows(), tr.size());
  g << above, hom;
  return g;
}

PolySet apply_null_space(const PolySet& basis, const DenseMatrix& constraints) {
  if (constraints.rows() == 0) return basis;
  const DenseMatrix n = null_space(constraints, default_tolerances().rank);
  return orthonormalize(basis.combine(n.transpose()));
}

void append_rows(DenseMatrix& g, const DenseMatrix& rows) {
  if (rows.rows() == 0) return;
  DenseMatrix out(g.rows() + rows.rows(), rows.cols());
  if (g.rows() > 0) out << g, rows;
  else out = rows;
  g = std::move(out);
}

bool is_vector_tag(SpaceTag tag) { return tag != SpaceTag::P_L3; }

template <class Key>
class Cache {
 public:
  template <class Build>
  PolyBasis get(const Key& key, Build&& build) {
    {
      std::lock_guard lock(mutex_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    PolyBasis b = build();
    std::lock_guard lock(mutex_);
    return map_.emplace(key, std::move(b)).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<Key, PolyBasis> map_;
};

PolyBasis basis_variable_unchecked(SpaceTag tag, const OrderSignature& sig);

}  // namespace

std::string to_string(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::P_L3: return "P_L3";
    case SpaceTag::P_L2: return "P_L2";
    case SpaceTag::PM_L2: return "PM_L2";
    case SpaceTag::PM_L1: return "PM_L1";
    case SpaceTag::P_L1: return "P_L1";
  }
  return "?";
}

OrderSignature OrderSignature::uniform(int r) {
  OrderSignature s;
  s.tet = r;
  s.face.fill(r);
  s.edge.fill(r);
  return s;
}

OrderSignature OrderSignature::shifted(int s) const {
  OrderSignature o = *this;
  o.tet += s;
  for (auto& f : o.face) f += s;
  for (auto& e : o.edge) e += s;
  return o;
}

bool OrderSignature::monotone() const {
  for (int f = 0; f < 4; ++f) {
    if (face[static_cast<std::size_t>(f)] > tet) return false;
    for (int e = 0; e < 6; ++e)
      if (edge_in_face(e, f) && edge[static_cast<std::size_t>(e)] > face[static_cast<std::size_t>(f)]) return false;
  }
  return true;
}

std::string to_string(const OrderSignature& sig) {
  std::ostringstream os;
  os << "T" << sig.tet << " F";
  for (int f : sig.face) os << f;
  os << " E";
  for (int e : sig.edge) os << e;
  return os.str();
}

const std::array<int, 3>& face_vertices(int f) { return kFaces.at(static_cast<std::size_t>(f)); }
const std::array<int, 2>& edge_vertices(int e) { return kEdges.at(static_cast<std::size_t>(e)); }

bool edge_in_face(int e, int f) {
  const auto& ev = edge_vertices(e);
  return ev[0] != f && ev[1] != f;
}

Vec3 reference_vertex(int v) {
  Vec3 p = Vec3::Zero();
  if (v > 0) p(v - 1) = 1.0;
  return p;
}

const FaceFrame& face_frame(int f) {
  static const std::array<FaceFrame, 4> frames = [] {
    std::array<FaceFrame, 4> out;
    for (int i = 0; i < 4; ++i) {
      const auto& fv = face_vertices(i);
      const Vec3 p0 = reference_vertex(fv[0]);
      const Vec3 p1 = reference_vertex(fv[1]);
      const Vec3 p2 = reference_vertex(fv[2]);
      FaceFrame fr;
      fr.face = i;
      fr.origin = p0;
      fr.n = (p1 - p0).cross(p2 - p0).normalized();
      fr.t1 = (p1 - p0).normalized();
      fr.t2 = fr.n.cross(fr.t1);
      out[static_cast<std::size_t>(i)] = fr;
    }
    return out;
  }();
  return frames.at(static_cast<std::size_t>(f));
}

int dim_p(int r) { return r < 0 ? 0 : (r + 1) * (r + 2) * (r + 3) / 6; }
int curl_image_dim(int r) { return (2 * r + 5) * r * (r - 1) / 2; }

PolySet row_copies(const PolySet& p) {
  PolySet out(p.vars(), 9, p.degree(), 0);
  for (int row = 0; row < 3; ++row) out = stack(out, as_matrix_row(p, row));
  return out;
}

PolySet differentiate(const PolySet& p, DiffOp op) {
  switch (op) {
    case DiffOp::Grad: return grad(p);
    case DiffOp::Curl: return curl(p);
    case DiffOp::Div: return div(p);
  }
  throw DimensionMismatch("unknown differential operator");
}

PolySet trace(const PolySet& p, int subsimplex, TraceKind kind) {
  if (kind == TraceKind::TangentialEdge) {
    const auto& ev = edge_vertices(subsimplex);
    const Vec3 a = reference_vertex(ev[0]);
    const Vec3 t = (reference_vertex(ev[1]) - a).normalized();
    const PolySet r = restrict_affine(p, a, Eigen::Matrix3Xd(t));
    DenseMatrix m(1, 3);
    m << t(0), t(1), t(2);
    return map_components(r, m);
  }
  const FaceFrame& fr = face_frame(subsimplex);
  Eigen::Matrix3Xd dirs(3, 2);
  dirs << fr.t1, fr.t2;
  const PolySet r = restrict_affine(p, fr.origin, dirs);
  if (kind == TraceKind::Normal) {
    if (p.ncomp() != 3) throw DimensionMismatch("normal trace needs vector fields");
    DenseMatrix m(1, 3);
    m << fr.n(0), fr.n(1), fr.n(2);
    return map_components(r, m);
  }
  if (p.ncomp() != 3) throw DimensionMismatch("tangential trace needs vector fields");
  DenseMatrix m(2, 3);
  m << fr.t1(0), fr.t1(1), fr.t1(2), fr.t2(0), fr.t2(1), fr.t2(2);
  return map_components(r, m);
}

PolyBasis basis_full(SpaceTag tag, int r) {
  static Cache<std::pair<SpaceTag, int>> cache;
  return cache.get({tag, r}, [&] {
    PolyBasis b;
    b.tag = tag;
    b.order = OrderSignature::uniform(r);
    switch (tag) {
      case SpaceTag::P_L3:
        b.fields = orthonormalize(scalar_monomials(r));
        break;
      case SpaceTag::P_L2:
      case SpaceTag::P_L1:
        b.fields = orthonormalize(vector_monomials(r));
        break;
      case SpaceTag::PM_L2: {
        if (r == 0) {
          b.fields = PolySet(3, 3, 0, 0);
          break;
        }
        PolySet span = vector_monomials(r - 1).raised(r);
        const PolySet s = scalar_monomials(r - 1);
        PolySet xs(3, 3, r, s.size());
        for (int c = 0; c < 3; ++c) xs.component(c) = times_coordinate(s, c).coef();
        b.fields = orthonormalize(stack(span, xs));
        break;
      }
      case SpaceTag::PM_L1: {
        if (r == 0) {
          b.fields = PolySet(3, 3, 0, 0);
          break;
        }
        const PolySet v = vector_monomials(r - 1);
        // x × v = (x2 v3 - x3 v2, x3 v1 - x1 v3, x1 v2 - x2 v1)
        PolySet xv(3, 3, r, v.size());
        auto xc = [&](int k, int c) {
          return times_coordinate(map_components(v, DenseMatrix(DenseMatrix::Identity(3, 3).row(c))), k);
        };
        xv.component(0) = (xc(1, 2) - xc(2, 1)).coef();
        xv.component(1) = (xc(2, 0) - xc(0, 2)).coef();
        xv.component(2) = (xc(0, 1) - xc(1, 0)).coef();
        b.fields = orthonormalize(stack(v.raised(r), xv));
        break;
      }
    }
    return b;
  });
}

PolyBasis basis_variable(SpaceTag tag, const OrderSignature& sig) {
  if (!sig.monotone()) throw NonMonotoneOrder("order signature " + to_string(sig) + " is not monotone");
  return basis_variable_unchecked(tag, sig);
}

namespace {

PolyBasis basis_variable_unchecked(SpaceTag tag, const OrderSignature& sig) {
  static Cache<std::pair<SpaceTag, OrderSignature>> cache;
  return cache.get({tag, sig}, [&] {
    PolyBasis full = basis_full(tag, sig.tet);
    PolyBasis b;
    b.tag = tag;
    b.order = sig;
    if (!is_vector_tag(tag) || full.size() == 0) {
      b.fields = full.fields;
      return b;
    }
    DenseMatrix g(0, full.size());
    for (int f = 0; f < 4; ++f) {
      const int rf = sig.face[static_cast<std::size_t>(f)];
      switch (tag) {
        case SpaceTag::P_L2:
          append_rows(g, high_degree_rows(trace(full.fields, f, TraceKind::Normal), rf + 1));
          break;
        case SpaceTag::PM_L2:
          append_rows(g, high_degree_rows(trace(full.fields, f, TraceKind::Normal), rf));
          break;
        case SpaceTag::PM_L1:
          append_rows(g, trimmed_face_rows(trace(full.fields, f, TraceKind::TangentialFace), rf));
          break;
        case SpaceTag::P_L1:
          append_rows(g, high_degree_rows(trace(full.fields, f, TraceKind::TangentialFace), rf + 1));
          break;
        default:
          break;
      }
    }
    if (tag == SpaceTag::PM_L1 || tag == SpaceTag::P_L1) {
      for (int e = 0; e < 6; ++e) {
        const int re = sig.edge[static_cast<std::size_t>(e)];
        const int lo = tag == SpaceTag::PM_L1 ? re : re + 1;
        append_rows(g, high_degree_rows(trace(full.fields, e, TraceKind::TangentialEdge), lo));
      }
    }
    b.fields = apply_null_space(full.fields, g);
    return b;
  });
}

}  // namespace

PolyBasis basis_ring(SpaceTag tag, int r) {
  static Cache<std::pair<SpaceTag, int>> cache;
  return cache.get({tag, r}, [&] {
    PolyBasis full = basis_full(tag, r);
    PolyBasis b;
    b.tag = tag;
    b.order = OrderSignature::uniform(r);
    if (full.size() == 0) {
      b.fields = full.fields;
      return b;
    }
    DenseMatrix g(0, full.size());
    for (int f = 0; f < 4; ++f) {
      if (tag == SpaceTag::P_L3) {
        const FaceFrame& fr = face_frame(f);
        Eigen::Matrix3Xd dirs(3, 2);
        dirs << fr.t1, fr.t2;
        append_rows(g, high_degree_rows(restrict_affine(full.fields, fr.origin, dirs), 0));
      } else if (tag == SpaceTag::P_L2 || tag == SpaceTag::PM_L2) {
        append_rows(g, high_degree_rows(trace(full.fields, f, TraceKind::Normal), 0));
      } else {
        append_rows(g, high_degree_rows(trace(full.fields, f, TraceKind::TangentialFace), 0));
      }
    }
    b.fields = apply_null_space(full.fields, g);
    return b;
  });
}

PolyBasis basis_ring_div_free(int r) {
  static Cache<int> cache;
  return cache.get(r, [&] {
    PolyBasis ring = basis_ring(SpaceTag::P_L2, r);
    PolyBasis b;
    b.tag = SpaceTag::P_L2;
    b.order = OrderSignature::uniform(r);
    b.fields = ring.size() == 0 ? ring.fields
                                : apply_null_space(ring.fields, high_degree_rows(div(ring.fields), 0));
    return b;
  });
}

PolyBasis curl_image_basis(int r) {
  static Cache<int> cache;
  return cache.get(r, [&] {
    PolyBasis ring = basis_ring(SpaceTag::P_L1, r + 1);
    PolyBasis b;
    b.tag = SpaceTag::P_L2;
    b.order = OrderSignature::uniform(r);
    PolySet image = ring.size() == 0 ? PolySet(3, 3, r, 0) : orthonormalize(curl(ring.fields));
    b.fields = row_copies(image);
    return b;
  });
}

PolyBasis complement_g_basis(int r) {
  static Cache<int> cache;
  return cache.get(r, [&] {
    PolyBasis b;
    b.tag = SpaceTag::P_L2;
    b.order = OrderSignature::uniform(r);
    if (r == 0) {
      b.fields = PolySet(3, 9, 0, 0);
      return b;
    }
    const PolySet q = basis_full(SpaceTag::P_L2, r - 1).fields;
    const PolySet g = grad(basis_full(SpaceTag::P_L3, r).fields);
    const DenseMatrix gram = l2_gram(g, q);
    const DenseMatrix n = null_space(gram, default_tolerances().rank);
    b.fields = row_copies(q.combine(n.transpose()));
    return b;
  });
}

}  // namespace afw3d
