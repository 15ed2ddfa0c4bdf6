#include "afw3d/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "afw3d/errors.hpp"
#include "afw3d/quadrature.hpp"

namespace afw3d {

namespace {

using CompMats = std::vector<DenseMatrix>;  // one (npoints x m) block per component

// (L U R)_{ij} = sum_{kl} L_ik U_kl R_lj as a 9x9 component map.
DenseMatrix sandwich_map(const Mat3& l, const Mat3& r) {
  DenseMatrix m(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int q = 0; q < 3; ++q) m(3 * i + j, 3 * k + q) = l(i, k) * r(q, j);
  return m;
}

DenseMatrix s1_map() {
  DenseMatrix m = DenseMatrix::Zero(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(3 * i + j, 3 * j + i) += 1.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(3 * i + i, 3 * k + k) -= 1.0;
  return m;
}

CompMats map_comps(const DenseMatrix& m, const CompMats& in) {
  CompMats out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = DenseMatrix::Zero(in[0].rows(), in[0].cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0.0) out[static_cast<std::size_t>(r)] += m(r, c) * in[static_cast<std::size_t>(c)];
  }
  return out;
}

CompMats split_columns(const DenseMatrix& values) {
  CompMats out(static_cast<std::size_t>(values.cols()));
  for (Eigen::Index c = 0; c < values.cols(); ++c) out[static_cast<std::size_t>(c)] = values.col(c);
  return out;
}

int functional_degree(const OrderSignature& sig) {
  return std::min(kMaxQuadratureDegree, std::max(kFieldQuadratureDegree, 2 * sig.tet + 6));
}

// Reference quadrature points on the tet and on each face.
struct QuadData {
  Eigen::MatrixX3d vol_pts;
  Vector vol_w;
  std::array<Eigen::MatrixX3d, 4> face_pts;
  std::array<Eigen::MatrixX3d, 4> face_st;  // (s1, s2, 0) face parameters
  Vector face_w;                            // reference-triangle weights
};

QuadData make_quad(int degree) {
  QuadData q;
  const QuadRule& v = rule_for(3, degree);
  q.vol_pts = v.points;
  q.vol_w = v.weights;
  const QuadRule& f = rule_for(2, degree);
  q.face_w = f.weights;
  for (int i = 0; i < 4; ++i) {
    const auto& fv = face_vertices(i);
    const Vec3 p0 = reference_vertex(fv[0]);
    const Vec3 p1 = reference_vertex(fv[1]);
    const Vec3 p2 = reference_vertex(fv[2]);
    Eigen::MatrixX3d pts(f.size(), 3);
    for (Eigen::Index k = 0; k < f.size(); ++k)
      pts.row(k) = (p0 + f.points(k, 0) * (p1 - p0) + f.points(k, 1) * (p2 - p0)).transpose();
    q.face_pts[static_cast<std::size_t>(i)] = pts;
    q.face_st[static_cast<std::size_t>(i)] = f.points;
  }
  return q;
}

// Geometry of the tet on which moments are taken.
struct Geometry {
  Mat3 a = Mat3::Identity();
  Vec3 b = Vec3::Zero();
  Mat3 ainv = Mat3::Identity();
  double absdet = 1.0;
  std::array<Vec3, 4> normal;  // outward unit normals
  std::array<Vec3, 4> t1, t2;  // unit tangents
  std::array<double, 4> area{};

  explicit Geometry(const AffineMap* am) {
    if (am) {
      a = am->a;
      b = am->b;
      ainv = am->ainv;
      absdet = std::abs(am->det);
    }
    std::array<Vec3, 4> p;
    for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i)] = a * reference_vertex(i) + b;
    for (int f = 0; f < 4; ++f) {
      const auto& fv = face_vertices(f);
      const Vec3 e1 = p[static_cast<std::size_t>(fv[1])] - p[static_cast<std::size_t>(fv[0])];
      const Vec3 e2 = p[static_cast<std::size_t>(fv[2])] - p[static_cast<std::size_t>(fv[0])];
      Vec3 n = e1.cross(e2);
      area[static_cast<std::size_t>(f)] = 0.5 * n.norm();
      n.normalize();
      if (n.dot(p[static_cast<std::size_t>(fv[0])] - p[static_cast<std::size_t>(f)]) < 0) n = -n;
      normal[static_cast<std::size_t>(f)] = n;
      t1[static_cast<std::size_t>(f)] = e1.normalized();
      t2[static_cast<std::size_t>(f)] = n.cross(t1[static_cast<std::size_t>(f)]);
    }
  }
};

// t-independent data of a family of moment systems.
struct Functionals {
  MomentKind kind = MomentKind::TwoMinus;
  OrderSignature sig;
  QuadData quad;
  PolySet target;
  std::array<DenseMatrix, 4> face_tab;  // (nfq x nq_f) face test values
  DenseMatrix eta_vol;                  // (nvq x neta)
  std::array<DenseMatrix, 3> deta_vol;  // reference partials
  std::array<DenseMatrix, 4> eta_face;
  CompMats aux_f;  // 9 blocks (nvq x k)
  CompMats aux_g;
  int k = 0;
  // Target tabulated at the quadrature points (reference components).
  CompMats target_vol;
  std::array<CompMats, 4> target_face;

  int face_rows() const {
    int n = 0;
    for (const auto& f : face_tab) n += static_cast<int>(f.cols()) * (kind == MomentKind::OneMinus ? 6 : 3);
    return n;
  }
  int div_rows() const { return 3 * static_cast<int>(eta_vol.cols()); }
};

PolySet face_test_basis(int d) {
  if (d < 0) return PolySet(2, 1, 0, 0);
  const int n = frame_size(2, d);
  return orthonormalize(PolySet(2, 1, d, DenseMatrix(DenseMatrix::Identity(n, n))));
}

PolySet mean_free_basis(int r) {
  const PolySet p = basis_full(SpaceTag::P_L3, r).fields;
  PolySet one(3, 1, 0, 1);
  one.coef()(0, 0) = 1.0;
  const DenseMatrix g = l2_gram(one, p);
  const DenseMatrix n = null_space(g, default_tolerances().rank);
  return p.combine(n.transpose());
}

PolySet target_space(MomentKind kind, const OrderSignature& sig) {
  switch (kind) {
    case MomentKind::TwoMinus:
      return row_copies(basis_variable(SpaceTag::PM_L2, sig.shifted(1)).fields);
    case MomentKind::OneMinus: {
      OrderSignature s = sig.shifted(2);
      s.edge.fill(0);
      return row_copies(basis_variable(SpaceTag::PM_L1, s).fields);
    }
    case MomentKind::Full2:
      return row_copies(basis_variable(SpaceTag::P_L2, sig.shifted(1)).fields);
  }
  throw DimensionMismatch("unknown moment kind");
}

std::shared_ptr<const Functionals> build_functionals(MomentKind kind, const OrderSignature& sig) {
  if (!sig.monotone()) throw NonMonotoneOrder("order signature " + to_string(sig) + " is not monotone");
  auto fn = std::make_shared<Functionals>();
  fn->kind = kind;
  fn->sig = sig;
  fn->quad = make_quad(functional_degree(sig));
  const QuadData& q = fn->quad;
  fn->target = target_space(kind, sig);
  for (int f = 0; f < 4; ++f) {
    const int d = sig.face[static_cast<std::size_t>(f)] + (kind == MomentKind::Full2 ? 1 : 0);
    const PolySet tests = face_test_basis(d);
    if (tests.size() == 0) {
      fn->face_tab[static_cast<std::size_t>(f)] = DenseMatrix(q.face_w.size(), 0);
    } else {
      fn->face_tab[static_cast<std::size_t>(f)] = tests.tabulate(q.face_st[static_cast<std::size_t>(f)])[0];
    }
  }
  const PolySet eta = mean_free_basis(sig.tet);
  if (eta.size() > 0) {
    fn->eta_vol = eta.tabulate(q.vol_pts)[0];
    for (int kx = 0; kx < 3; ++kx) fn->deta_vol[static_cast<std::size_t>(kx)] = partial(eta, kx).tabulate(q.vol_pts)[0];
    for (int f = 0; f < 4; ++f) fn->eta_face[static_cast<std::size_t>(f)] = eta.tabulate(q.face_pts[static_cast<std::size_t>(f)])[0];
  } else {
    fn->eta_vol = DenseMatrix(q.vol_w.size(), 0);
    for (auto& d : fn->deta_vol) d = DenseMatrix(q.vol_w.size(), 0);
    for (auto& d : fn->eta_face) d = DenseMatrix(q.face_w.size(), 0);
  }
  PolySet af, ag;
  if (kind == MomentKind::Full2) {
    af = row_copies(basis_ring_div_free(sig.tet + 1).fields);
    ag = af;
    ag.coef().setZero();
  } else {
    af = curl_image_basis(sig.tet).fields;
    ag = complement_g_basis(sig.tet).fields;
  }
  fn->k = static_cast<int>(af.size());
  if (ag.size() != af.size()) throw DimensionMismatch("auxiliary families differ in size");
  auto tab9 = [&](const PolySet& p) {
    if (p.size() == 0) return CompMats(9, DenseMatrix(q.vol_w.size(), 0));
    return p.tabulate(q.vol_pts);
  };
  fn->aux_f = tab9(af);
  fn->aux_g = tab9(ag);
  fn->target_vol = fn->target.tabulate(q.vol_pts);
  for (int f = 0; f < 4; ++f) fn->target_face[static_cast<std::size_t>(f)] = fn->target.tabulate(q.face_pts[static_cast<std::size_t>(f)]);
  return fn;
}

std::shared_ptr<const Functionals> functionals(MomentKind kind, const OrderSignature& sig) {
  static std::mutex mutex;
  static std::map<std::pair<MomentKind, OrderSignature>, std::shared_ptr<const Functionals>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({kind, sig});
    if (it != cache.end()) return it->second;
  }
  auto fn = build_functionals(kind, sig);
  std::lock_guard lock(mutex);
  return cache.emplace(std::make_pair(kind, sig), fn).first->second;
}

struct Blocks {
  DenseMatrix fixed;  // face and divergence rows
  DenseMatrix aux_f;
  DenseMatrix aux_g;
};

// Moment values of m fields sampled at the quadrature points (components in
// the frame of `geo`).
Blocks apply_functionals(const Functionals& fn, const Geometry& geo, const CompMats& vol,
                         const std::array<CompMats, 4>& face) {
  const QuadData& q = fn.quad;
  const Eigen::Index m = vol[0].cols();
  const bool one = fn.kind == MomentKind::OneMinus;
  Blocks out;
  out.fixed = DenseMatrix::Zero(fn.face_rows() + fn.div_rows(), m);

  Eigen::Index row = 0;
  for (int f = 0; f < 4; ++f) {
    const auto fs = static_cast<std::size_t>(f);
    const DenseMatrix wt = (q.face_w * (2.0 * geo.area[fs])).asDiagonal() * fn.face_tab[fs];
    const Eigen::Index nq = wt.cols();
    if (nq == 0) continue;
    std::vector<Vec3> dirs;
    if (one) dirs = {geo.t1[fs], geo.t2[fs]};
    else dirs = {geo.normal[fs]};
    for (const Vec3& d : dirs) {
      for (int c = 0; c < 3; ++c) {
        DenseMatrix v = d(0) * face[fs][static_cast<std::size_t>(3 * c)] + d(1) * face[fs][static_cast<std::size_t>(3 * c + 1)] +
                        d(2) * face[fs][static_cast<std::size_t>(3 * c + 2)];
        out.fixed.middleRows(row, nq) = wt.transpose() * v;
        row += nq;
      }
    }
  }

  // Divergence and auxiliary moments act on S1 W for Π^{1,-}.
  CompMats svol = one ? map_comps(s1_map(), vol) : vol;
  std::array<CompMats, 4> sface;
  for (int f = 0; f < 4; ++f)
    sface[static_cast<std::size_t>(f)] = one ? map_comps(s1_map(), face[static_cast<std::size_t>(f)]) : face[static_cast<std::size_t>(f)];

  const Eigen::Index neta = fn.eta_vol.cols();
  if (neta > 0) {
    const Vector wv = q.vol_w * geo.absdet;
    // Physical partials of eta: d/dx_k = sum_j ainv(j, k) d/dx̂_j.
    std::array<DenseMatrix, 3> deta;
    for (int kx = 0; kx < 3; ++kx) {
      deta[static_cast<std::size_t>(kx)] = DenseMatrix::Zero(fn.eta_vol.rows(), neta);
      for (int j = 0; j < 3; ++j) deta[static_cast<std::size_t>(kx)] += geo.ainv(j, kx) * fn.deta_vol[static_cast<std::size_t>(j)];
      deta[static_cast<std::size_t>(kx)] = wv.asDiagonal() * deta[static_cast<std::size_t>(kx)];
    }
    for (int c = 0; c < 3; ++c) {
      DenseMatrix acc = DenseMatrix::Zero(neta, m);
      for (int f = 0; f < 4; ++f) {
        const auto fs = static_cast<std::size_t>(f);
        const Vec3& n = geo.normal[fs];
        const DenseMatrix we = (q.face_w * (2.0 * geo.area[fs])).asDiagonal() * fn.eta_face[fs];
        DenseMatrix v = n(0) * sface[fs][static_cast<std::size_t>(3 * c)] + n(1) * sface[fs][static_cast<std::size_t>(3 * c + 1)] +
                        n(2) * sface[fs][static_cast<std::size_t>(3 * c + 2)];
        acc += we.transpose() * v;
      }
      for (int kx = 0; kx < 3; ++kx) acc -= deta[static_cast<std::size_t>(kx)].transpose() * svol[static_cast<std::size_t>(3 * c + kx)];
      out.fixed.middleRows(row, neta) = acc;
      row += neta;
    }
  }

  out.aux_f = DenseMatrix::Zero(fn.k, m);
  out.aux_g = DenseMatrix::Zero(fn.k, m);
  if (fn.k > 0) {
    const Vector wv = q.vol_w * geo.absdet;
    // Test fields A ĥ A^{-1} on the physical tet.
    const DenseMatrix hm = sandwich_map(geo.a, geo.ainv);
    const CompMats hf = map_comps(hm, fn.aux_f);
    const CompMats hg = map_comps(hm, fn.aux_g);
    for (int c = 0; c < 9; ++c) {
      const auto cs = static_cast<std::size_t>(c);
      out.aux_f += (wv.asDiagonal() * hf[cs]).transpose() * svol[cs];
      out.aux_g += (wv.asDiagonal() * hg[cs]).transpose() * svol[cs];
    }
  }
  return out;
}

DenseMatrix combine_blocks(const Blocks& b, double t) {
  DenseMatrix c(b.fixed.rows() + b.aux_f.rows(), b.fixed.cols());
  c << b.fixed, (1.0 - t) * b.aux_f + t * b.aux_g;
  return c;
}

const Blocks& reference_blocks(MomentKind kind, const OrderSignature& sig) {
  static std::mutex mutex;
  static std::map<std::pair<MomentKind, OrderSignature>, std::unique_ptr<Blocks>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({kind, sig});
    if (it != cache.end()) return *it->second;
  }
  auto fn = functionals(kind, sig);
  const Geometry geo(nullptr);
  auto blocks = std::make_unique<Blocks>(apply_functionals(*fn, geo, fn->target_vol, fn->target_face));
  std::lock_guard lock(mutex);
  return *cache.emplace(std::make_pair(kind, sig), std::move(blocks)).first->second;
}

MomentSystem make_system(MomentKind kind, const OrderSignature& sig, double t) {
  auto fn = functionals(kind, sig);
  const Blocks& b = reference_blocks(kind, sig);
  MomentSystem s;
  s.kind = kind;
  s.order = sig;
  s.t = t;
  s.target = fn->target;
  s.c = combine_blocks(b, t);
  s.face_rows = fn->face_rows();
  s.div_rows = fn->div_rows();
  s.aux_rows = fn->k;
  if (s.c.rows() != s.c.cols()) {
    throw DimensionMismatch(to_string(kind) + " system for " + to_string(sig) + " has " + std::to_string(s.c.rows()) +
                            " rows and " + std::to_string(s.c.cols()) + " columns");
  }
  return s;
}

struct Solver {
  std::shared_ptr<const Functionals> fn;
  std::unique_ptr<DenseLU> lu;
  double t = 0.0;
};

const Solver& solver_for(MomentKind kind, const OrderSignature& sig) {
  static std::mutex mutex;
  static std::map<std::pair<MomentKind, OrderSignature>, std::unique_ptr<Solver>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({kind, sig});
    if (it != cache.end()) return *it->second;
  }
  const double t = kind == MomentKind::Full2 ? 0.0 : select_t(sig.tet);
  MomentSystem s = make_system(kind, sig, t);
  auto sol = std::make_unique<Solver>();
  sol->fn = functionals(kind, sig);
  sol->lu = std::make_unique<DenseLU>(s.c);
  sol->t = t;
  if (sol->lu->singular()) {
    throw SingularMomentSystem(to_string(kind) + " system for " + to_string(sig) + " is singular at t = " + std::to_string(t));
  }
  std::lock_guard lock(mutex);
  return *cache.emplace(std::make_pair(kind, sig), std::move(sol)).first->second;
}

// Field values at the quadrature points of a tet, physical components.
void sample(const SimplicialMesh& mesh, int tet, const Functionals& fn, const FieldSample& u, CompMats& vol,
            std::array<CompMats, 4>& face) {
  const AffineMap& am = mesh.affine(tet);
  auto to_phys = [&](const Eigen::MatrixX3d& ref) {
    Eigen::MatrixX3d p = (ref * am.a.transpose()).rowwise() + am.b.transpose();
    return p;
  };
  vol = split_columns(u.values(tet, to_phys(fn.quad.vol_pts), fn.quad.vol_pts));
  for (int f = 0; f < 4; ++f) {
    const auto& rp = fn.quad.face_pts[static_cast<std::size_t>(f)];
    face[static_cast<std::size_t>(f)] = split_columns(u.values(tet, to_phys(rp), rp));
  }
}

// Component maps between the physical field and its reference counterpart.
DenseMatrix pull_map(MomentKind kind, const AffineMap& am) {
  if (kind == MomentKind::OneMinus) return sandwich_map(am.ainv, am.a);     // Ŵ = A^{-1} W A
  return sandwich_map(am.a.transpose(), am.ainv.transpose());              // Û = A^T U A^{-T}
}

DenseMatrix push_map(MomentKind kind, const AffineMap& am) {
  if (kind == MomentKind::OneMinus) return sandwich_map(am.a, am.ainv);     // W = A Ŵ A^{-1}
  return sandwich_map(am.ainv.transpose(), am.a.transpose());              // U = A^{-T} Û A^T
}

LocalResult finish(const Functionals& fn, MomentKind kind, const AffineMap& am, const Vector& coef) {
  LocalResult r;
  r.coef = coef;
  const PolySet ref = fn.target.combine(DenseMatrix(coef.transpose()));
  r.field = map_components(ref, push_map(kind, am));
  return r;
}

LocalResult reference_route(MomentKind kind, const SimplicialMesh& mesh, int tet, const OrderSignature& sig,
                            const FieldSample& u) {
  if (u.ncomp() != 9) throw DimensionMismatch("matrix field expected");
  const Solver& s = solver_for(kind, sig);
  const AffineMap& am = mesh.affine(tet);
  CompMats vol;
  std::array<CompMats, 4> face;
  sample(mesh, tet, *s.fn, u, vol, face);
  const DenseMatrix pm = pull_map(kind, am);
  vol = map_comps(pm, vol);
  for (auto& f : face) f = map_comps(pm, f);
  const Geometry geo(nullptr);
  const Blocks b = apply_functionals(*s.fn, geo, vol, face);
  const Vector rhs = combine_blocks(b, s.t).col(0);
  return finish(*s.fn, kind, am, s.lu->solve(rhs));
}

LocalResult physical_route(MomentKind kind, const SimplicialMesh& mesh, int tet, const OrderSignature& sig,
                           const FieldSample& u) {
  if (u.ncomp() != 9) throw DimensionMismatch("matrix field expected");
  const Solver& s = solver_for(kind, sig);
  const AffineMap& am = mesh.affine(tet);
  const Geometry geo(&am);
  const DenseMatrix push = push_map(kind, am);
  CompMats tv = map_comps(push, s.fn->target_vol);
  std::array<CompMats, 4> tf;
  for (int f = 0; f < 4; ++f) tf[static_cast<std::size_t>(f)] = map_comps(push, s.fn->target_face[static_cast<std::size_t>(f)]);
  const DenseMatrix c = combine_blocks(apply_functionals(*s.fn, geo, tv, tf), s.t);
  CompMats vol;
  std::array<CompMats, 4> face;
  sample(mesh, tet, *s.fn, u, vol, face);
  const Vector rhs = combine_blocks(apply_functionals(*s.fn, geo, vol, face), s.t).col(0);
  DenseLU lu(c);
  if (lu.singular()) throw SingularMomentSystem("physical moment system is singular on tet " + std::to_string(tet));
  return finish(*s.fn, kind, am, lu.solve(rhs));
}

}  // namespace

std::string to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::TwoMinus: return "Pi2-";
    case MomentKind::OneMinus: return "Pi1-";
    case MomentKind::Full2: return "Pi2";
  }
  return "?";
}

MomentSystem build_moment_system_2minus(const OrderSignature& sig, double t) {
  return make_system(MomentKind::TwoMinus, sig, t);
}

MomentSystem build_moment_system_1minus(const OrderSignature& sig, double t) {
  return make_system(MomentKind::OneMinus, sig, t);
}

MomentSystem build_moment_system_full2(const OrderSignature& sig) { return make_system(MomentKind::Full2, sig, 0.0); }

double equilibrated_log_det(const DenseMatrix& c) {
  if (c.rows() == 0) return 0.0;
  DenseMatrix s = c;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double m = s.row(i).cwiseAbs().maxCoeff();
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    s.row(i) /= m;
  }
  const DetSignLog d = det_sign_and_logmag(s);
  if (d.sign == 0) return -std::numeric_limits<double>::infinity();
  return d.logmag / static_cast<double>(s.rows());
}

TSelection select_t_detail(int r) {
  static std::mutex mutex;
  static std::map<int, TSelection> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(r);
    if (it != cache.end()) return it->second;
  }
  const OrderSignature sig = OrderSignature::uniform(r);
  const Blocks& b2 = reference_blocks(MomentKind::TwoMinus, sig);
  const Blocks& b1 = reference_blocks(MomentKind::OneMinus, sig);
  TSelection best;
  best.score = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (int j = 0; j <= 64; ++j) {
    const double t = j / 64.0;
    const double s = std::min(equilibrated_log_det(combine_blocks(b2, t)), equilibrated_log_det(combine_blocks(b1, t)));
    if (std::isfinite(s) && (!found || s > best.score)) {
      best = {t, j, s};
      found = true;
    }
  }
  if (!found) throw NoAdmissibleT("every grid value of t gives a singular system for r = " + std::to_string(r));
  std::lock_guard lock(mutex);
  cache.emplace(r, best);
  return best;
}

double select_t(int r) { return select_t_detail(r).t; }

LocalResult interp_p2minus(const SimplicialMesh& mesh, int tet, const OrderSignature& sig, const FieldSample& u) {
  return reference_route(MomentKind::TwoMinus, mesh, tet, sig, u);
}

LocalResult interp_p1minus(const SimplicialMesh& mesh, int tet, const OrderSignature& sig, const FieldSample& w) {
  return reference_route(MomentKind::OneMinus, mesh, tet, sig, w);
}

LocalResult interp_p2_local(const SimplicialMesh& mesh, int tet, const OrderSignature& sig, const FieldSample& u) {
  return reference_route(MomentKind::Full2, mesh, tet, sig, u);
}

LocalResult interp_p2minus_physical(const SimplicialMesh& mesh, int tet, const OrderSignature& sig,
                                    const FieldSample& u) {
  return physical_route(MomentKind::TwoMinus, mesh, tet, sig, u);
}

LocalResult interp_p1minus_physical(const SimplicialMesh& mesh, int tet, const OrderSignature& sig,
                                    const FieldSample& w) {
  return physical_route(MomentKind::OneMinus, mesh, tet, sig, w);
}

// ------------------------------------------------------------ global fields --

FieldSample DiscreteField::as_field(const SimplicialMesh& mesh) const { return FieldSample::piecewise(mesh, local); }

double local_l2_norm(const SimplicialMesh& mesh, int tet, const PolySet& p) {
  const double v = l2_gram(p, p)(0, 0) * std::abs(mesh.affine(tet).det);
  return std::sqrt(std::max(v, 0.0));
}

DiscreteField project_l2_p3(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& f) {
  DiscreteField out;
  out.space = "P_r(T)";
  const int nc = f.ncomp();
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const int order = r.tet[static_cast<std::size_t>(t)];
    const PolySet phi = basis_full(SpaceTag::P_L3, order).fields;
    const QuadRule& q = rule_for(3, std::min(kMaxQuadratureDegree, std::max(kFieldQuadratureDegree, 2 * order + 2)));
    const AffineMap& am = mesh.affine(t);
    const Eigen::MatrixX3d phys = (q.points * am.a.transpose()).rowwise() + am.b.transpose();
    const DenseMatrix vals = f.values(t, phys, q.points);
    const DenseMatrix tab = phi.tabulate(q.points)[0];
    const double sq = std::sqrt(std::abs(am.det));
    // coef(c, j) = int_T f_c phi_j / sqrt|det| dx = sqrt|det| sum_q w f phî
    const DenseMatrix coef = sq * (tab.transpose() * q.weights.asDiagonal() * vals);  // (n x nc)
    Vector cv(coef.size());
    PolySet loc(3, nc, order, 1);
    for (int c = 0; c < nc; ++c) {
      cv.segment(c * coef.rows(), coef.rows()) = coef.col(c);
      loc.component(c) = (coef.col(c).transpose() / sq) * phi.coef();
    }
    out.coef.push_back(cv);
    out.local.push_back(loc);
  }
  return out;
}

namespace {

DiscreteField collect(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& u,
                      LocalResult (*op)(const SimplicialMesh&, int, const OrderSignature&, const FieldSample&),
                      const std::string& space) {
  DiscreteField out;
  out.space = space;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    LocalResult lr = op(mesh, t, signature_of(mesh, r, t), u);
    out.coef.push_back(std::move(lr.coef));
    out.local.push_back(std::move(lr.field));
  }
  return out;
}

}  // namespace

DiscreteField interp_p2(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& u) {
  return collect(mesh, r, u, &interp_p2_local, "P_{r+1}L2(V)");
}

DiscreteField interp_p2minus_global(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& u) {
  return collect(mesh, r, u, &interp_p2minus, "P-_{r+1}L2(V)");
}

DiscreteField interp_p1minus_global(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& w) {
  return collect(mesh, r, w, &interp_p1minus, "P-_{r+2}L1(V)");
}

DiscreteField clement(const SimplicialMesh& mesh, const FieldSample& w) {
  const int nc = w.ncomp();
  std::vector<Vector> sum(static_cast<std::size_t>(mesh.num_vertices()), Vector::Zero(nc));
  std::vector<double> vol(static_cast<std::size_t>(mesh.num_vertices()), 0.0);
  const QuadRule& q = rule_for(3, kFieldQuadratureDegree);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const AffineMap& am = mesh.affine(t);
    const Eigen::MatrixX3d phys = (q.points * am.a.transpose()).rowwise() + am.b.transpose();
    const DenseMatrix vals = w.values(t, phys, q.points);
    const Vector integral = std::abs(am.det) * (vals.transpose() * q.weights);
    for (int v : mesh.tet(t)) {
      sum[static_cast<std::size_t>(v)] += integral;
      vol[static_cast<std::size_t>(v)] += mesh.volume(t);
    }
  }
  DiscreteField out;
  out.space = "P1 continuous";
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tv = mesh.tet(t);
    std::array<Vector, 4> val;
    for (int i = 0; i < 4; ++i)
      val[static_cast<std::size_t>(i)] = sum[static_cast<std::size_t>(tv[static_cast<std::size_t>(i)])] /
                                         vol[static_cast<std::size_t>(tv[static_cast<std::size_t>(i)])];
    PolySet loc(3, nc, 1, 1);
    Vector cv(4 * nc);
    for (int c = 0; c < nc; ++c) {
      loc.component(c)(0, 0) = val[0](c);
      for (int k = 0; k < 3; ++k) loc.component(c)(0, 1 + k) = val[static_cast<std::size_t>(k) + 1](c) - val[0](c);
    }
    for (int i = 0; i < 4; ++i) cv.segment(i * nc, nc) = val[static_cast<std::size_t>(i)];
    out.coef.push_back(cv);
    out.local.push_back(loc);
  }
  return out;
}

DiscreteField interp_p1minus_stabilized(const SimplicialMesh& mesh, const OrderMap& r, const FieldSample& w) {
  const DiscreteField rh = clement(mesh, w);
  const FieldSample rest = w - rh.as_field(mesh);
  DiscreteField pi = interp_p1minus_global(mesh, r, rest);
  DiscreteField out;
  out.space = "P-_{r+2}L1(V) + P1";
  for (int t = 0; t < mesh.num_tets(); ++t) {
    Vector cv(pi.coef[static_cast<std::size_t>(t)].size() + rh.coef[static_cast<std::size_t>(t)].size());
    cv << pi.coef[static_cast<std::size_t>(t)], rh.coef[static_cast<std::size_t>(t)];
    out.coef.push_back(cv);
    out.local.push_back(pi.local[static_cast<std::size_t>(t)] + rh.local[static_cast<std::size_t>(t)]);
  }
  return out;
}

double interface_jump(const SimplicialMesh& mesh, const DiscreteField& f, Continuity kind) {
  double jump = 0.0;
  const QuadRule& q = rule_for(2, 2 * kMaxOrder);
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    if (mesh.is_boundary_face(fi)) continue;
    const auto& w = mesh.face(fi);
    const Vec3 p0 = mesh.vertex(w[0]), p1 = mesh.vertex(w[1]), p2 = mesh.vertex(w[2]);
    Eigen::MatrixX3d pts(q.size(), 3);
    for (Eigen::Index k = 0; k < q.size(); ++k)
      pts.row(k) = (p0 + q.points(k, 0) * (p1 - p0) + q.points(k, 1) * (p2 - p0)).transpose();
    const Vec3 n = mesh.face_normal(fi);
    const Vec3 t1 = (p1 - p0).normalized();
    const Vec3 t2 = n.cross(t1);
    std::vector<Vec3> dirs = kind == Continuity::Normal ? std::vector<Vec3>{n} : std::vector<Vec3>{t1, t2};
    std::array<DenseMatrix, 2> traces;
    for (int s = 0; s < 2; ++s) {
      const int t = mesh.face_tets(fi)[static_cast<std::size_t>(s)];
      const AffineMap& am = mesh.affine(t);
      const Eigen::MatrixX3d ref = (pts.rowwise() - am.b.transpose()) * am.ainv.transpose();
      const auto tab = f.local[static_cast<std::size_t>(t)].tabulate(ref);
      const int rows = f.local[static_cast<std::size_t>(t)].ncomp() / 3;
      DenseMatrix tr(q.size(), rows * static_cast<int>(dirs.size()));
      for (int r = 0; r < rows; ++r)
        for (std::size_t d = 0; d < dirs.size(); ++d)
          tr.col(r * static_cast<int>(dirs.size()) + static_cast<int>(d)) =
              dirs[d](0) * tab[static_cast<std::size_t>(3 * r)].col(0) + dirs[d](1) * tab[static_cast<std::size_t>(3 * r + 1)].col(0) +
              dirs[d](2) * tab[static_cast<std::size_t>(3 * r + 2)].col(0);
      traces[static_cast<std::size_t>(s)] = tr;
    }
    jump = std::max(jump, (traces[0] - traces[1]).cwiseAbs().maxCoeff());
  }
  return jump;
}

DiscreteField elementwise_to_global(const SimplicialMesh& mesh, std::vector<LocalResult> parts, Continuity kind,
                                    const std::string& space, double tol) {
  if (static_cast<int>(parts.size()) != mesh.num_tets()) throw DimensionMismatch("one element result per tet expected");
  DiscreteField out;
  out.space = space;
  double scale = 0.0;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    auto& p = parts[static_cast<std::size_t>(t)];
    scale = std::max(scale, local_l2_norm(mesh, t, p.field) / std::sqrt(mesh.volume(t)));
    out.coef.push_back(std::move(p.coef));
    out.local.push_back(std::move(p.field));
  }
  const double jump = interface_jump(mesh, out, kind);
  if (jump > tol * std::max(1.0, scale)) {
    throw ConformityViolation("interface trace jump " + std::to_string(jump) + " exceeds tolerance");
  }
  return out;
}

}  // namespace afw3d
