#include "hdgpath/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hdgpath {

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' '
     << mesh.num_edges() << '\n';
  char buf[80];
  for (const Vec2& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x(), v.y());
    os << buf;
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.region[t]
       << '\n';
  }
  for (const MeshEdge& e : mesh.edges)
    os << e.a << ' ' << e.b << ' ' << static_cast<int>(e.cls) << '\n';
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path, std::ios::binary);  // LF line endings everywhere
  if (!os) throw std::runtime_error("write_mesh: cannot open " + path);
  write_mesh(os, mesh);
  if (!os) throw std::runtime_error("write_mesh: write failed for " + path);
}

namespace {

class TokenReader {
 public:
  TokenReader(std::istream& is, std::string name)
      : is_(is), name_(std::move(name)) {}

  std::string next() {
    while (pos_ >= queue_.size()) {
      std::string line;
      if (!std::getline(is_, line))
        throw std::runtime_error(name_ + ": unexpected end of file at line " +
                                 std::to_string(lineno_));
      ++lineno_;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      queue_.clear();
      pos_ = 0;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) queue_.push_back(tok);
    }
    return queue_[pos_++];
  }

  long integer() {
    std::string t = next();
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(t, &used);
    } catch (const std::exception&) {
      fail("expected integer, got '" + t + "'");
    }
    if (used != t.size()) fail("expected integer, got '" + t + "'");
    return v;
  }

  double real() {
    std::string t = next();
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      fail("expected number, got '" + t + "'");
    }
    if (used != t.size()) fail("expected number, got '" + t + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(name_ + ":" + std::to_string(lineno_) + ": " + msg);
  }

 private:
  std::istream& is_;
  std::string name_;
  std::vector<std::string> queue_;
  std::size_t pos_ = 0;
  int lineno_ = 0;
};

}  // namespace

Mesh read_mesh(std::istream& is, const std::string& name) {
  TokenReader tr(is, name);
  long nv = tr.integer(), nt = tr.integer(), ne = tr.integer();
  if (nv < 3 || nt < 1 || ne < 3) tr.fail("implausible mesh size header");

  Mesh mesh;
  mesh.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    double x = tr.real(), y = tr.real();
    mesh.vertices.emplace_back(x, y);
  }
  for (long t = 0; t < nt; ++t) {
    std::array<int, 3> tri;
    for (int& v : tri) {
      long idx = tr.integer();
      if (idx < 0 || idx >= nv) tr.fail("vertex index out of range");
      v = static_cast<int>(idx);
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      tr.fail("triangle with repeated vertex");
    long reg = tr.integer();
    if (reg != 1 && reg != 2) tr.fail("region label must be 1 or 2");
    mesh.triangles.push_back(tri);
    mesh.region.push_back(static_cast<int>(reg));
  }

  build_connectivity(mesh);
  if (static_cast<long>(mesh.edges.size()) != ne)
    tr.fail("edge count " + std::to_string(ne) + " does not match triangulation (" +
            std::to_string(mesh.edges.size()) + ")");

  std::map<std::pair<int, int>, int> index;
  for (int e = 0; e < mesh.num_edges(); ++e)
    index[{mesh.edges[e].a, mesh.edges[e].b}] = e;

  std::vector<bool> seen(mesh.edges.size(), false);
  for (long i = 0; i < ne; ++i) {
    long a = tr.integer(), b = tr.integer(), cls = tr.integer();
    if (a < 0 || a >= nv || b < 0 || b >= nv) tr.fail("edge vertex out of range");
    auto it = index.find({static_cast<int>(std::min(a, b)),
                          static_cast<int>(std::max(a, b))});
    if (it == index.end()) tr.fail("edge not present in the triangulation");
    if (seen[it->second]) tr.fail("duplicate edge entry");
    seen[it->second] = true;
    if (cls < 0 || cls > 3) tr.fail("edge class out of range");
    MeshEdge& edge = mesh.edges[it->second];
    auto c = static_cast<EdgeClass>(cls);
    bool boundary = edge.tri[1] == -1;
    bool region_change =
        !boundary && mesh.region[edge.tri[0]] != mesh.region[edge.tri[1]];
    if (boundary && (c == EdgeClass::interior || c == EdgeClass::interface))
      tr.fail("boundary edge must be dirichlet or neumann");
    if (!boundary && (c == EdgeClass::dirichlet || c == EdgeClass::neumann))
      tr.fail("interior edge cannot carry a boundary class");
    if (region_change != (c == EdgeClass::interface))
      tr.fail("interface class inconsistent with region labels");
    edge.cls = c;
  }

  validate_mesh(mesh);
  return mesh;
}

Mesh read_mesh(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_mesh: cannot open " + path);
  return read_mesh(is, path);
}

}  // namespace hdgpath
