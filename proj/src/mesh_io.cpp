#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "afw3d/errors.hpp"
#include "afw3d/mesh.hpp"

namespace afw3d {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw MeshFormatError("bad number '" + s + "'");
  return v;
}

long parse_int(const std::string& s) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw MeshFormatError("bad integer '" + s + "'");
  return v;
}

std::string next_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw MeshFormatError(std::string("unexpected end of file reading ") + what);
  return tok;
}

void expect(std::istream& is, const std::string& word) {
  const std::string tok = next_token(is, word.c_str());
  if (tok != word) throw MeshFormatError("expected '" + word + "', found '" + tok + "'");
}

}  // namespace

void write_mesh(std::ostream& os, const SimplicialMesh& m, const std::vector<int>* orders) {
  os << "afw3d-mesh v1\n";
  os << "vertices " << m.num_vertices() << "\n";
  for (const auto& v : m.vertices())
    os << format_double(v(0)) << ' ' << format_double(v(1)) << ' ' << format_double(v(2)) << "\n";
  os << "tets " << m.num_tets() << "\n";
  for (const auto& t : m.tets()) os << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << "\n";
  if (orders) {
    os << "orders " << orders->size() << "\n";
    for (std::size_t i = 0; i < orders->size(); ++i) os << (*orders)[i] << (i + 1 == orders->size() ? "\n" : " ");
  }
}

MeshFile read_mesh(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "afw3d-mesh v1") throw MeshFormatError("missing 'afw3d-mesh v1' header");
  expect(is, "vertices");
  const long nv = parse_int(next_token(is, "vertex count"));
  if (nv < 0) throw MeshFormatError("negative vertex count");
  std::vector<Vec3> verts(static_cast<std::size_t>(nv));
  for (auto& v : verts)
    for (int k = 0; k < 3; ++k) v(k) = parse_double(next_token(is, "coordinate"));
  expect(is, "tets");
  const long nt = parse_int(next_token(is, "tet count"));
  if (nt < 0) throw MeshFormatError("negative tet count");
  std::vector<std::array<int, 4>> tets(static_cast<std::size_t>(nt));
  for (auto& t : tets)
    for (int k = 0; k < 4; ++k) t[static_cast<std::size_t>(k)] = static_cast<int>(parse_int(next_token(is, "tet index")));
  MeshFile out;
  std::string tok;
  if (is >> tok) {
    if (tok != "orders") throw MeshFormatError("unexpected token '" + tok + "'");
    const long no = parse_int(next_token(is, "order count"));
    if (no != nt) throw MeshFormatError("orders block has " + std::to_string(no) + " entries for " + std::to_string(nt) + " tets");
    std::vector<int> orders(static_cast<std::size_t>(no));
    for (auto& o : orders) o = static_cast<int>(parse_int(next_token(is, "order")));
    out.orders = std::move(orders);
  }
  out.mesh = build_complex(std::move(verts), std::move(tets));
  return out;
}

MeshFile read_mesh_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MeshFormatError("cannot open " + path);
  return read_mesh(f);
}

}  // namespace afw3d
