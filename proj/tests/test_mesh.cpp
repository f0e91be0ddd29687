#include "hdgpath/mesh.hpp"
#include "hdgpath/mesh_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <map>
#include <sstream>

using namespace hdgpath;

namespace {

double total_area(const Mesh& m, int region = 0) {
  double a = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t)
    if (region == 0 || m.region[t] == region) a += m.tri_area(t);
  return a;
}

int count_edges(const Mesh& m, EdgeClass c) {
  int n = 0;
  for (const MeshEdge& e : m.edges) n += e.cls == c;
  return n;
}

DomainSpec unit_square_spec() {
  DomainSpec spec;
  spec.boundary = {std::make_shared<PolygonCurve>(
      make_rectangle(Vec2(0, 0), Vec2(1, 1)))};
  spec.bbox_lo = Vec2(0, 0);
  spec.bbox_hi = Vec2(1, 1);
  return spec;
}

}  // namespace

TEST(SquareGrid, CountsAreasAndOrientation) {
  Mesh m = generate_square_grid(Vec2(0, 0), Vec2(1, 1), 4, 4);
  EXPECT_EQ(m.num_vertices(), 25);
  EXPECT_EQ(m.num_triangles(), 32);
  EXPECT_EQ(m.num_edges(), 3 * 16 + 2 * 4);
  int boundary = 0;
  for (const MeshEdge& e : m.edges) boundary += e.tri[1] == -1;
  EXPECT_EQ(boundary, 16);
  for (int t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.tri_area(t), 0.0);
  EXPECT_NEAR(total_area(m), 1.0, 1e-14);
  validate_mesh(m);
}

TEST(SquareGrid, EdgeGeometryHelpers) {
  Mesh m = generate_square_grid(Vec2(0, 0), Vec2(2, 1), 2, 1);
  validate_mesh(m);
  for (int e = 0; e < m.num_edges(); ++e) {
    const MeshEdge& ed = m.edges[e];
    EXPECT_LT(ed.a, ed.b);
    for (int s = 0; s < 2; ++s) {
      int t = ed.tri[s];
      if (t == -1) continue;
      Vec2 n = m.edge_normal_out(e, t);
      EXPECT_NEAR(n.norm(), 1.0, 1e-14);
      EXPECT_GT((m.edge_point(e, 0.5) - m.centroid(t)).dot(n), 0.0);
    }
  }
}

TEST(Immersed, UnitSquareInsetGrid) {
  DomainSpec spec = unit_square_spec();
  Mesh m = generate_immersed(spec, 8);
  // One cell ring is lost: the kept block is (1/8, 7/8)^2.
  EXPECT_EQ(m.num_triangles(), 2 * 6 * 6);
  EXPECT_NEAR(m.h_max(), std::sqrt(2.0) / 8.0, 1e-14);
  for (const Vec2& v : m.vertices) {
    EXPECT_TRUE(spec.inside(v));
    EXPECT_GE(v.x(), 1.0 / 8 - 1e-14);
    EXPECT_LE(v.x(), 7.0 / 8 + 1e-14);
  }
  validate_mesh(m);
}

TEST(Immersed, TrianglesLieInsideDomain) {
  DomainSpec spec;
  auto outer = std::make_shared<CircleCurve>(Vec2(0.5, 0.5), 2.0);
  auto inner = std::make_shared<CircleCurve>(Vec2(0.5, 0.5), 1.0);
  inner->reverse();
  spec.boundary = {outer, inner};
  spec.bbox_lo = Vec2(0.5 - 2.0, 0.5 - 2.0);
  spec.bbox_hi = Vec2(0.5 + 2.0, 0.5 + 2.0);
  Mesh m = generate_immersed(spec, 32);
  validate_mesh(m);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < m.num_triangles(); ++t) {
    Vec2 a = m.vertices[m.triangles[t][0]], b = m.vertices[m.triangles[t][1]],
         c = m.vertices[m.triangles[t][2]];
    for (int s = 0; s < 10; ++s) {
      double u = uni(rng), v = uni(rng);
      if (u + v > 1) {
        u = 1 - u;
        v = 1 - v;
      }
      EXPECT_TRUE(spec.inside(a + u * (b - a) + v * (c - a)));
    }
  }
  // The uncovered band must stay within a couple of cells of the boundary.
  double h = m.h_max();
  for (const MeshEdge& e : m.edges) {
    if (e.tri[1] != -1) continue;
    Vec2 mid = m.edge_point(&e - m.edges.data(), 0.5);
    double gap = std::abs(spec.implicit_value(mid));
    EXPECT_LT(gap, 2.0 * h);
  }
}

TEST(Annulus, VerticesOnRingsAndArea) {
  Vec2 c(0.5, 0.5);
  Mesh m = generate_annulus(c, 1.0, 2.0, 24);
  validate_mesh(m);
  CircleCurve inner(c, 1.0), outer(c, 2.0);
  for (const MeshEdge& e : m.edges) {
    if (e.tri[1] != -1) continue;
    for (int v : {e.a, e.b}) {
      double r = (m.vertices[v] - c).norm();
      EXPECT_TRUE(std::abs(r - 1.0) < 1e-12 || std::abs(r - 2.0) < 1e-12);
    }
  }
  double exact = M_PI * (4.0 - 1.0);
  double a24 = exact - total_area(m);
  Mesh m2 = generate_annulus(c, 1.0, 2.0, 48);
  double a48 = exact - total_area(m2);
  EXPECT_GT(a24, 0.0);  // chords cut area away
  EXPECT_GT(a48, 0.0);
  double ratio = a24 / a48;
  EXPECT_GT(ratio, 3.2);
  EXPECT_LT(ratio, 4.8);
}

TEST(Snapped, EllipseInterfaceResolved) {
  EllipseCurve ell(Vec2(0, 0), 0.8, 0.4);
  Mesh m = generate_snapped(Vec2(-1, -1), Vec2(1, 1), 24, ell,
                            SnapMode::keep_both);
  validate_mesh(m);
  int n_iface = count_edges(m, EdgeClass::interface);
  EXPECT_GT(n_iface, 8);
  // Interface chords have on-curve endpoints and form closed loops.
  std::map<int, int> valence;
  for (const MeshEdge& e : m.edges) {
    if (e.cls != EdgeClass::interface) continue;
    EXPECT_LT(std::abs(ell.implicit_value(m.vertices[e.a])), 1e-10);
    EXPECT_LT(std::abs(ell.implicit_value(m.vertices[e.b])), 1e-10);
    valence[e.a]++;
    valence[e.b]++;
  }
  for (auto [v, count] : valence) EXPECT_EQ(count, 2) << "vertex " << v;

  // Region-1 area converges to the ellipse area at second order.
  double exact = M_PI * 0.8 * 0.4;
  double d1 = std::abs(total_area(m, 1) - exact);
  Mesh m2 = generate_snapped(Vec2(-1, -1), Vec2(1, 1), 48, ell,
                             SnapMode::keep_both);
  double d2 = std::abs(total_area(m2, 1) - exact);
  EXPECT_LT(d2, d1 / 2.5);
}

TEST(Snapped, KidneyInterfaceResolved) {
  KidneyCurve kid;
  Mesh m = generate_snapped(Vec2(-1, -1), Vec2(1, 1), 32, kid,
                            SnapMode::keep_both);
  validate_mesh(m);
  std::map<int, int> valence;
  for (const MeshEdge& e : m.edges) {
    if (e.cls != EdgeClass::interface) continue;
    EXPECT_LT(std::abs(kid.implicit_value(m.vertices[e.a])), 1e-10 * kid.scale());
    valence[e.a]++;
    valence[e.b]++;
  }
  ASSERT_FALSE(valence.empty());
  for (auto [v, count] : valence) EXPECT_EQ(count, 2);
}

TEST(Snapped, CircularHole) {
  CircleCurve hole(Vec2(0.1, 0.0), 0.35);
  Mesh m = generate_snapped(Vec2(-1, -1), Vec2(1, 1), 24, hole,
                            SnapMode::drop_region1);
  validate_mesh(m);
  for (int r : m.region) EXPECT_EQ(r, 1);
  int hole_edges = 0;
  for (const MeshEdge& e : m.edges) {
    if (e.tri[1] != -1) continue;
    Vec2 a = m.vertices[e.a];
    bool on_box = std::abs(std::abs(a.x()) - 1.0) < 1e-12 ||
                  std::abs(std::abs(a.y()) - 1.0) < 1e-12;
    if (!on_box) {
      ++hole_edges;
      EXPECT_LT(std::abs(hole.implicit_value(a)), 1e-10);
    }
  }
  EXPECT_GT(hole_edges, 10);
}

TEST(Immersed, AirfoilHoleInBox) {
  // The sharp trailing edge is below any fixed cell size, so the airfoil
  // domain is meshed with the immersed (strictly exterior) fit.
  auto foil = std::make_shared<JoukowskyAirfoil>(0.1605, Vec2(0.01, 0.01));
  foil->reverse();  // the flow region is the outside
  DomainSpec spec;
  spec.boundary = {std::make_shared<PolygonCurve>(
                       make_rectangle(Vec2(-0.5, -0.5), Vec2(0.5, 0.5))),
                   foil};
  spec.bbox_lo = Vec2(-0.5, -0.5);
  spec.bbox_hi = Vec2(0.5, 0.5);
  Mesh m = generate_immersed(spec, 48);
  validate_mesh(m);
  for (const Vec2& v : m.vertices) EXPECT_TRUE(spec.inside(v));
  // A hole is actually cut out.
  double area = total_area(m);
  EXPECT_LT(area, 1.0 - 0.01);
  EXPECT_GT(area, 0.8);
}

TEST(MeshIo, RoundTripIsExact) {
  EllipseCurve ell(Vec2(0, 0), 0.8, 0.4);
  Mesh m = generate_snapped(Vec2(-1, -1), Vec2(1, 1), 12, ell,
                            SnapMode::keep_both);
  std::ostringstream os;
  write_mesh(os, m);
  std::istringstream is(os.str());
  Mesh back = read_mesh(is, "roundtrip");
  ASSERT_EQ(back.num_vertices(), m.num_vertices());
  ASSERT_EQ(back.num_triangles(), m.num_triangles());
  ASSERT_EQ(back.num_edges(), m.num_edges());
  for (int v = 0; v < m.num_vertices(); ++v) {
    EXPECT_EQ(back.vertices[v].x(), m.vertices[v].x());  // bitwise
    EXPECT_EQ(back.vertices[v].y(), m.vertices[v].y());
  }
  for (int t = 0; t < m.num_triangles(); ++t) {
    EXPECT_EQ(back.triangles[t], m.triangles[t]);
    EXPECT_EQ(back.region[t], m.region[t]);
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    EXPECT_EQ(back.edges[e].a, m.edges[e].a);
    EXPECT_EQ(back.edges[e].b, m.edges[e].b);
    EXPECT_EQ(back.edges[e].cls, m.edges[e].cls);
  }
  // Second trip is byte-identical.
  std::ostringstream os2;
  write_mesh(os2, back);
  EXPECT_EQ(os.str(), os2.str());
}

TEST(MeshIo, CommentsAreIgnored) {
  Mesh m = generate_square_grid(Vec2(0, 0), Vec2(1, 1), 1, 1);
  std::ostringstream os;
  write_mesh(os, m);
  std::string text = "# header comment\n" + os.str() + "# trailing comment\n";
  std::istringstream is(text);
  Mesh back = read_mesh(is, "comments");
  EXPECT_EQ(back.num_triangles(), 2);
}

TEST(MeshIo, RejectsMalformedInput) {
  Mesh m = generate_square_grid(Vec2(0, 0), Vec2(1, 1), 2, 2);
  std::ostringstream os;
  write_mesh(os, m);
  std::string good = os.str();

  {
    std::istringstream is(good.substr(0, good.size() / 2));
    EXPECT_THROW(read_mesh(is, "truncated"), std::runtime_error);
  }
  {
    std::string bad = good;
    bad.replace(bad.find("0 1 "), 4, "0 9 ");  // out-of-range vertex
    std::istringstream is(bad);
    EXPECT_THROW(read_mesh(is, "badvertex"), std::runtime_error);
  }
  {
    std::istringstream is("abc\n");
    EXPECT_THROW(read_mesh(is, "nonsense"), std::runtime_error);
  }
}

TEST(MeshIo, RejectsInconsistentClasses) {
  Mesh m = generate_square_grid(Vec2(0, 0), Vec2(1, 1), 2, 2);
  std::ostringstream os;
  write_mesh(os, m);
  std::string text = os.str();
  // Find an interior edge line (class 0) and claim it is Dirichlet.
  auto pos = text.rfind(" 0\n");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 3, " 1\n");
  std::istringstream is(text);
  EXPECT_THROW(read_mesh(is, "badclass"), std::runtime_error);
}

TEST(Validate, CatchesBrokenMeshes) {
  Mesh m = generate_square_grid(Vec2(0, 0), Vec2(1, 1), 2, 2);
  Mesh broken = m;
  broken.region[0] = 5;
  EXPECT_THROW(validate_mesh(broken), std::runtime_error);

  broken = m;
  broken.edges[m.tri_edges[0][0]].cls = EdgeClass::interior;
  // Only a problem if that edge is on the boundary; find a boundary edge.
  for (MeshEdge& e : broken.edges)
    if (e.tri[1] == -1) e.cls = EdgeClass::interior;
  EXPECT_THROW(validate_mesh(broken), std::runtime_error);
}
