#include "hdgpath/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hdgpath {

double Mesh::tri_area(int t) const {
  const auto& tri = triangles[t];
  Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

double Mesh::tri_diameter(int t) const {
  const auto& tri = triangles[t];
  Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

Vec2 Mesh::centroid(int t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

double Mesh::edge_length(int e) const {
  return (vertices[edges[e].b] - vertices[edges[e].a]).norm();
}

Vec2 Mesh::edge_point(int e, double theta) const {
  return (1.0 - theta) * vertices[edges[e].a] + theta * vertices[edges[e].b];
}

Vec2 Mesh::edge_normal_out(int e, int t) const {
  Vec2 tang = (vertices[edges[e].b] - vertices[edges[e].a]).normalized();
  Vec2 n(tang.y(), -tang.x());
  Vec2 mid = edge_point(e, 0.5);
  return (mid - centroid(t)).dot(n) >= 0 ? n : Vec2(-n);
}

double Mesh::h_max() const {
  double h = 0.0;
  for (int t = 0; t < num_triangles(); ++t) h = std::max(h, tri_diameter(t));
  return h;
}

int Mesh::neighbor(int t, int e) const {
  const MeshEdge& ed = edges[e];
  return ed.tri[0] == t ? ed.tri[1] : ed.tri[0];
}

void build_connectivity(Mesh& mesh) {
  if (mesh.region.empty()) mesh.region.assign(mesh.triangles.size(), 1);
  if (mesh.region.size() != mesh.triangles.size())
    throw std::runtime_error("build_connectivity: region size mismatch");

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tri_area(t) < 0.0)
      std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
    if (mesh.tri_area(t) <= 0.0)
      throw std::runtime_error("build_connectivity: degenerate triangle " +
                               std::to_string(t));
  }

  mesh.edges.clear();
  mesh.tri_edges.assign(mesh.triangles.size(), {-1, -1, -1});
  std::map<std::pair<int, int>, int> index;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      int va = mesh.triangles[t][i], vb = mesh.triangles[t][(i + 1) % 3];
      std::pair<int, int> key{std::min(va, vb), std::max(va, vb)};
      auto it = index.find(key);
      if (it == index.end()) {
        MeshEdge e;
        e.a = key.first;
        e.b = key.second;
        e.tri = {t, -1};
        index.emplace(key, mesh.num_edges());
        mesh.tri_edges[t][i] = mesh.num_edges();
        mesh.edges.push_back(e);
      } else {
        MeshEdge& e = mesh.edges[it->second];
        if (e.tri[1] != -1)
          throw std::runtime_error("build_connectivity: edge with >2 triangles");
        e.tri[1] = t;
        mesh.tri_edges[t][i] = it->second;
      }
    }
  }

  for (MeshEdge& e : mesh.edges) {
    if (e.tri[1] == -1) {
      e.cls = EdgeClass::dirichlet;  // provisional until classification
      continue;
    }
    int r0 = mesh.region[e.tri[0]], r1 = mesh.region[e.tri[1]];
    if (r0 != r1) {
      e.cls = EdgeClass::interface;
      if (r0 != 1) std::swap(e.tri[0], e.tri[1]);
    } else {
      e.cls = EdgeClass::interior;
    }
  }
}

void validate_mesh(const Mesh& mesh) {
  if (mesh.triangles.size() != mesh.region.size())
    throw std::runtime_error("validate_mesh: region label count mismatch");
  if (mesh.tri_edges.size() != mesh.triangles.size())
    throw std::runtime_error("validate_mesh: missing connectivity");
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tri_area(t) <= 0.0)
      throw std::runtime_error("validate_mesh: non-positive area");
    if (mesh.region[t] != 1 && mesh.region[t] != 2)
      throw std::runtime_error("validate_mesh: region label out of range");
    for (int i = 0; i < 3; ++i) {
      int e = mesh.tri_edges[t][i];
      if (e < 0 || e >= mesh.num_edges())
        throw std::runtime_error("validate_mesh: bad edge index");
      const MeshEdge& ed = mesh.edges[e];
      if (ed.tri[0] != t && ed.tri[1] != t)
        throw std::runtime_error("validate_mesh: adjacency mismatch");
    }
  }
  for (const MeshEdge& e : mesh.edges) {
    bool boundary = e.tri[1] == -1;
    if (boundary && e.cls == EdgeClass::interior)
      throw std::runtime_error("validate_mesh: interior class on boundary edge");
    if (boundary && e.cls == EdgeClass::interface)
      throw std::runtime_error("validate_mesh: interface edge on boundary");
    if (!boundary) {
      int r0 = mesh.region[e.tri[0]], r1 = mesh.region[e.tri[1]];
      if ((r0 != r1) != (e.cls == EdgeClass::interface))
        throw std::runtime_error(
            "validate_mesh: region change without interface class");
      if (e.cls == EdgeClass::interface && mesh.region[e.tri[0]] != 1)
        throw std::runtime_error("validate_mesh: interface side order");
      if (e.cls == EdgeClass::dirichlet || e.cls == EdgeClass::neumann)
        throw std::runtime_error("validate_mesh: boundary class on interior edge");
    }
  }
}

Mesh generate_square_grid(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("generate_square_grid: need nx, ny >= 1");
  Mesh mesh;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx,
                                 lo.y() + (hi.y() - lo.y()) * j / ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  mesh.region.assign(mesh.triangles.size(), 1);
  build_connectivity(mesh);
  return mesh;
}

namespace {

// Drops unused vertices and remaps triangle indices.
void compact_vertices(Mesh& mesh) {
  std::vector<int> remap(mesh.vertices.size(), -1);
  std::vector<Vec2> verts;
  for (auto& tri : mesh.triangles) {
    for (int& v : tri) {
      if (remap[v] == -1) {
        remap[v] = static_cast<int>(verts.size());
        verts.push_back(mesh.vertices[v]);
      }
      v = remap[v];
    }
  }
  mesh.vertices = std::move(verts);
}

}  // namespace

Mesh generate_immersed(const DomainSpec& spec, int n) {
  Mesh bg = generate_square_grid(spec.bbox_lo, spec.bbox_hi, n, n);
  Mesh mesh;
  mesh.vertices = bg.vertices;
  for (int t = 0; t < bg.num_triangles(); ++t) {
    const auto& tri = bg.triangles[t];
    bool keep = true;
    for (int i = 0; i < 3 && keep; ++i) {
      Vec2 a = bg.vertices[tri[i]], b = bg.vertices[tri[(i + 1) % 3]];
      keep = spec.inside(a) && spec.inside(0.5 * (a + b));
    }
    if (keep) {
      mesh.triangles.push_back(tri);
      mesh.region.push_back(spec.region_of(bg.centroid(t)));
    }
  }
  if (mesh.triangles.empty())
    throw std::runtime_error("generate_immersed: no interior triangles; refine the grid");
  compact_vertices(mesh);
  build_connectivity(mesh);
  return mesh;
}

Mesh generate_annulus(const Vec2& center, double r_in, double r_out, int m) {
  if (m < 3) throw std::invalid_argument("generate_annulus: need m >= 3");
  if (!(0.0 < r_in && r_in < r_out))
    throw std::invalid_argument("generate_annulus: need 0 < r_in < r_out");
  // Radial layer count targeting near-equilateral triangles.
  double chord = M_PI * (r_in + r_out) / m;
  int layers = std::max(1, static_cast<int>(std::lround(
                               (r_out - r_in) / (0.866 * chord))));
  Mesh mesh;
  auto vid = [&](int ring, int i) { return ring * m + ((i % m) + m) % m; };
  for (int ring = 0; ring <= layers; ++ring) {
    double r = r_in + (r_out - r_in) * ring / layers;
    double offset = 0.5 * (ring % 2);
    for (int i = 0; i < m; ++i) {
      double a = 2.0 * M_PI * (i + offset) / m;
      mesh.vertices.emplace_back(center.x() + r * std::cos(a),
                                 center.y() + r * std::sin(a));
    }
  }
  for (int ring = 0; ring < layers; ++ring) {
    for (int i = 0; i < m; ++i) {
      if (ring % 2 == 0) {
        // Next ring is offset by half a chord to the positive side.
        mesh.triangles.push_back({vid(ring, i), vid(ring, i + 1), vid(ring + 1, i)});
        mesh.triangles.push_back(
            {vid(ring, i + 1), vid(ring + 1, i + 1), vid(ring + 1, i)});
      } else {
        mesh.triangles.push_back(
            {vid(ring, i), vid(ring, i + 1), vid(ring + 1, i + 1)});
        mesh.triangles.push_back(
            {vid(ring, i), vid(ring + 1, i + 1), vid(ring + 1, i)});
      }
    }
  }
  mesh.region.assign(mesh.triangles.size(), 1);
  build_connectivity(mesh);
  return mesh;
}

Mesh generate_snapped(const Vec2& lo, const Vec2& hi, int n,
                      const Curve& curve, SnapMode mode) {
  Mesh mesh = generate_square_grid(lo, hi, n, n);
  double scale = std::max(curve.scale(), (hi - lo).norm());
  double cell = (hi - lo).cwiseAbs().maxCoeff() / n;

  std::vector<double> f(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    f[v] = curve.implicit_value(mesh.vertices[v]);

  auto on_bbox = [&](const Vec2& p) {
    double tol = 1e-12 * scale;
    return std::abs(p.x() - lo.x()) < tol || std::abs(p.x() - hi.x()) < tol ||
           std::abs(p.y() - lo.y()) < tol || std::abs(p.y() - hi.y()) < tol;
  };

  // Best snap candidate per vertex: nearest crossing on an incident edge.
  std::vector<double> best(mesh.vertices.size(),
                           std::numeric_limits<double>::max());
  std::vector<Vec2> target(mesh.vertices.size());
  for (const MeshEdge& e : mesh.edges) {
    if (f[e.a] * f[e.b] >= 0.0) continue;
    Vec2 pa = mesh.vertices[e.a], pb = mesh.vertices[e.b];
    double len = (pb - pa).norm();
    auto t = curve.ray_hit(pa, (pb - pa) / len, len);
    if (!t) {
      throw std::runtime_error(
          "generate_snapped: sign change without located crossing; "
          "refine the grid");
    }
    Vec2 p = pa + *t * (pb - pa) / len;
    double da = *t, db = len - *t;
    int v = da <= db ? e.a : e.b;
    double d = std::min(da, db);
    if (on_bbox(mesh.vertices[v])) {
      v = v == e.a ? e.b : e.a;
      d = std::max(da, db);
    }
    if (on_bbox(mesh.vertices[v]))
      throw std::runtime_error("generate_snapped: curve reaches the bounding box");
    if (d < best[v]) {
      best[v] = d;
      target[v] = p;
    }
  }
  bool any = false;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (best[v] < std::numeric_limits<double>::max()) {
      mesh.vertices[v] = target[v];
      f[v] = curve.implicit_value(target[v]);
      any = true;
    }
  }
  if (!any)
    throw std::runtime_error("generate_snapped: curve does not cross the grid");

  // Region labels from the (snapped) centroids.
  Mesh out;
  out.vertices = mesh.vertices;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    int reg = curve.implicit_value(mesh.centroid(t)) <= 0.0 ? 1 : 2;
    if (mode == SnapMode::drop_region1 && reg == 1) continue;
    if (mesh.tri_area(t) < 1e-4 * cell * cell)
      throw std::runtime_error(
          "generate_snapped: snapping produced a degenerate triangle; "
          "refine the grid");
    out.triangles.push_back(mesh.triangles[t]);
    out.region.push_back(mode == SnapMode::drop_region1 ? 1 : reg);
  }
  if (out.triangles.empty())
    throw std::runtime_error("generate_snapped: empty mesh");
  compact_vertices(out);
  build_connectivity(out);

  // The curve must now be resolved by on-curve chords: every edge between
  // the two regions (or on the hole boundary) needs both endpoints on the
  // curve.
  double tol = 1e-10 * scale;
  for (const MeshEdge& e : out.edges) {
    bool chord = e.cls == EdgeClass::interface;
    if (mode == SnapMode::drop_region1 && e.tri[1] == -1) {
      // Boundary edges away from the box walls border the hole.
      chord = !(on_bbox(out.vertices[e.a]) && on_bbox(out.vertices[e.b]));
    }
    if (chord) {
      if (std::abs(curve.implicit_value(out.vertices[e.a])) > tol ||
          std::abs(curve.implicit_value(out.vertices[e.b])) > tol)
        throw std::runtime_error(
            "generate_snapped: region boundary not resolved on the curve; "
            "refine the grid");
    }
  }
  return out;
}

}  // namespace hdgpath
