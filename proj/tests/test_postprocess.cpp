#include "hdgpath/postprocess.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

using namespace hdgpath;

namespace {

DomainSpec square_spec(const Mat2& K) {
  DomainSpec spec;
  spec.boundary = {std::make_shared<PolygonCurve>(
      make_rectangle(Vec2(0, 0), Vec2(1, 1)))};
  spec.bbox_lo = Vec2(0, 0);
  spec.bbox_hi = Vec2(1, 1);
  spec.diffusion1 = K;
  spec.diffusion2 = K;
  return spec;
}

struct Solved {
  Mesh mesh;
  DomainSpec spec;
  HdgBlocks blocks;
  FieldSolution sol;
};

Solved solve_square(int n, int k, const Mat2& K, const ProblemData& data) {
  Solved s;
  s.spec = square_spec(K);
  s.mesh = generate_square_grid(Vec2(0, 0), Vec2(1, 1), n, n);
  classify_edges(s.mesh, s.spec, PathStrategy::p2);
  PathFamily paths = build_paths(s.mesh, s.spec, PathStrategy::p2,
                                 gauss_legendre(k + 3).nodes);
  s.blocks = build_blocks(s.mesh, s.spec, paths, k, data,
                          Stabilization::standard(s.mesh, s.spec));
  s.sol = solve_condensed(s.blocks);
  return s;
}

}  // namespace

TEST(Postprocess, ExactLinearSolutionReproduced) {
  ProblemData data;
  data.source = [](const Vec2&, int) { return 0.0; };
  data.dirichlet = [](const Vec2& p) { return p.x(); };
  Solved s = solve_square(2, 1, Mat2::Identity(), data);
  PostprocessedField star = postprocess(s.sol, s.blocks);
  EXPECT_EQ(star.degree, 2);
  for (int t = 0; t < s.mesh.num_triangles(); ++t) {
    Vec2 p = s.mesh.centroid(t) + Vec2(0.03, -0.02);
    EXPECT_NEAR(star.eval(t, p), p.x(), 1e-12);
  }
}

TEST(Postprocess, ZeroFluxGivesPiecewiseMeans) {
  ProblemData data;
  data.source = [](const Vec2&, int) { return 0.0; };
  data.dirichlet = [](const Vec2& p) { return p.x() * p.y(); };
  Solved s = solve_square(3, 2, Mat2::Identity(), data);
  // Overwrite the flux with zero, keeping u_h as solved.
  for (int t = 0; t < s.mesh.num_triangles(); ++t)
    s.sol.x.segment(s.blocks.space->q_offset(t), 2 * s.blocks.space->nk())
        .setZero();
  PostprocessedField star = postprocess(s.sol, s.blocks);
  TriangleRule tri = triangle_rule(8);
  for (int t = 0; t < s.mesh.num_triangles(); ++t) {
    const auto& tv = s.mesh.triangles[t];
    MappedRule vol =
        map_to_triangle(tri, s.mesh.vertices[tv[0]], s.mesh.vertices[tv[1]],
                        s.mesh.vertices[tv[2]]);
    double um = 0.0;
    for (std::size_t p = 0; p < vol.points.size(); ++p)
      um += vol.weights[p] * s.sol.u(t, vol.points[p]);
    um /= s.mesh.tri_area(t);
    for (std::size_t p = 0; p < vol.points.size(); ++p)
      EXPECT_NEAR(star.eval(t, vol.points[p]), um, 1e-12);
  }
}

// Independent oracle: assemble the constrained local problem in a plain
// monomial basis and compare pointwise values of u*.
TEST(Postprocess, MatchesDenseMonomialOracle) {
  const int k = 2;
  Mat2 K;
  K << 1.7, 0.4, 0.4, 0.8;
  ProblemData data;
  data.source = [](const Vec2& p, int) { return std::sin(3 * p.x()) + p.y(); };
  data.dirichlet = [](const Vec2& p) { return std::cos(2 * p.x() - p.y()); };
  Solved s = solve_square(3, k, K, data);
  PostprocessedField star = postprocess(s.sol, s.blocks);

  const int t = 7;
  const auto& tv = s.mesh.triangles[t];
  Vec2 a = s.mesh.vertices[tv[0]], b = s.mesh.vertices[tv[1]],
       c = s.mesh.vertices[tv[2]];
  Vec2 cen = s.mesh.centroid(t);
  const int deg = k + 1, nm = (deg + 1) * (deg + 2) / 2;
  std::vector<std::array<int, 2>> pw;
  for (int d = 0; d <= deg; ++d)
    for (int i = d; i >= 0; --i) pw.push_back({i, d - i});
  auto mono = [&](int j, const Vec2& p) {
    return std::pow(p.x() - cen.x(), pw[j][0]) *
           std::pow(p.y() - cen.y(), pw[j][1]);
  };
  auto mono_grad = [&](int j, const Vec2& p) {
    double gx = pw[j][0] ? pw[j][0] * std::pow(p.x() - cen.x(), pw[j][0] - 1) *
                               std::pow(p.y() - cen.y(), pw[j][1])
                         : 0.0;
    double gy = pw[j][1] ? pw[j][1] * std::pow(p.x() - cen.x(), pw[j][0]) *
                               std::pow(p.y() - cen.y(), pw[j][1] - 1)
                         : 0.0;
    return Vec2(gx, gy);
  };

  MappedRule vol = map_to_triangle(triangle_rule(10), a, b, c);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nm + 1, nm + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nm + 1);
  Mat2 kinv = K.inverse();
  double umean = 0.0;
  for (std::size_t p = 0; p < vol.points.size(); ++p) {
    double wq = vol.weights[p];
    umean += wq * s.sol.u(t, vol.points[p]);
    Vec2 kq = kinv * s.sol.q(t, vol.points[p]);
    for (int i = 0; i < nm; ++i) {
      Vec2 gi = mono_grad(i, vol.points[p]);
      rhs[i] -= wq * gi.dot(kq);
      for (int j = 0; j < nm; ++j)
        A(i, j) += wq * gi.dot(mono_grad(j, vol.points[p]));
      A(i, nm) += wq * mono(i, vol.points[p]);
      A(nm, i) = A(i, nm);
    }
  }
  Eigen::VectorXd co = A.fullPivLu().solve(rhs).head(nm);
  double ubar = umean / s.mesh.tri_area(t);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    double r1 = unif(rng), r2 = unif(rng);
    if (r1 + r2 > 1) {
      r1 = 1 - r1;
      r2 = 1 - r2;
    }
    Vec2 p = a + r1 * (b - a) + r2 * (c - a);
    double oracle = ubar;
    for (int j = 0; j < nm; ++j) oracle += co[j] * mono(j, p);
    EXPECT_NEAR(star.eval(t, p), oracle, 1e-12);
  }
}

TEST(Postprocess, MeanPreservedEveryElement) {
  Mat2 K;
  K << 1.3, 0.2, 0.2, 0.9;
  ProblemData data;
  data.source = [](const Vec2& p, int) { return std::exp(p.x() - p.y()); };
  data.dirichlet = [](const Vec2& p) { return std::sin(p.x() + 2 * p.y()); };
  for (int k : {1, 2, 3}) {
    Solved s = solve_square(4, k, K, data);
    PostprocessedField star = postprocess(s.sol, s.blocks);
    TriangleRule tri = triangle_rule(2 * k + 4);
    for (int t = 0; t < s.mesh.num_triangles(); ++t) {
      const auto& tv = s.mesh.triangles[t];
      MappedRule vol =
          map_to_triangle(tri, s.mesh.vertices[tv[0]], s.mesh.vertices[tv[1]],
                          s.mesh.vertices[tv[2]]);
      double um = 0.0;
      for (std::size_t p = 0; p < vol.points.size(); ++p)
        um += vol.weights[p] * s.sol.u(t, vol.points[p]);
      um /= s.mesh.tri_area(t);
      EXPECT_NEAR(star.mean(t), um, 1e-12) << "k=" << k << " t=" << t;
    }
  }
}

TEST(Postprocess, LowestOrderInterfaceUsesOwnSideTrace) {
  Mat2 K1 = 2.0 * Mat2::Identity(), K2 = 0.5 * Mat2::Identity();
  const int k = 0;
  DomainSpec spec;
  spec.boundary = {std::make_shared<PolygonCurve>(
      make_rectangle(Vec2(-1, -1), Vec2(1, 1)))};
  spec.interface = std::make_shared<PolygonCurve>(
      make_rectangle(Vec2(0, -1), Vec2(1, 1)));
  spec.bbox_lo = Vec2(-1, -1);
  spec.bbox_hi = Vec2(1, 1);
  spec.diffusion1 = K1;
  spec.diffusion2 = K2;
  Mesh mesh = generate_square_grid(Vec2(-1, -1), Vec2(1, 1), 4, 4);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    mesh.region[t] = mesh.centroid(t).x() > 0 ? 1 : 2;
  build_connectivity(mesh);
  classify_edges(mesh, spec, PathStrategy::p2);
  PathFamily paths =
      build_paths(mesh, spec, PathStrategy::p2, gauss_legendre(k + 3).nodes);

  ProblemData data;
  data.source = [](const Vec2&, int) { return 0.0; };
  data.dirichlet = [](const Vec2& p) { return p.x() > 0 ? 1.75 : 1.0; };
  data.jump_scalar = [](const Vec2&) { return 0.75; };
  data.jump_flux = [](const Vec2&) { return 0.0; };
  HdgBlocks blocks = build_blocks(mesh, spec, paths, k, data,
                                  Stabilization::standard(mesh, spec));
  FieldSolution sol = solve_condensed(blocks);
  PostprocessedField star = postprocess(sol, blocks);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double expect = mesh.region[t] == 1 ? 1.75 : 1.0;
    EXPECT_NEAR(star.eval(t, mesh.centroid(t)), expect, 1e-10) << "t=" << t;
  }
}
