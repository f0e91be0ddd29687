#include "hdgpath/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hdgpath;

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Exact monomial integral over the reference triangle.
double exact_ref_monomial(int i, int j) {
  return factorial(i) * factorial(j) / factorial(i + j + 2);
}

}  // namespace

TEST(GaussLegendre, NodesAndWeightsAreValid) {
  for (int n = 1; n <= 20; ++n) {
    GaussRule g = gauss_legendre(n);
    ASSERT_EQ(g.nodes.size(), static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(g.nodes[i], 0.0);
      EXPECT_LT(g.nodes[i], 1.0);
      EXPECT_GT(g.weights[i], 0.0);
      if (i > 0) EXPECT_GT(g.nodes[i], g.nodes[i - 1]);
      sum += g.weights[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(GaussLegendre, ExactForPolynomialsUpTo2nMinus1) {
  for (int n = 1; n <= 12; ++n) {
    GaussRule g = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], d);
      EXPECT_NEAR(s, 1.0 / (d + 1), 5e-15) << "n=" << n << " d=" << d;
    }
  }
}

TEST(GaussLegendre, NotExactBeyondOrder) {
  GaussRule g = gauss_legendre(2);
  double s = 0.0;
  for (int i = 0; i < 2; ++i) s += g.weights[i] * std::pow(g.nodes[i], 4);
  EXPECT_GT(std::abs(s - 0.2), 1e-4);
}

TEST(TriangleRule, WeightsPositiveAndSumToHalf) {
  for (int d = 0; d <= 14; ++d) {
    TriangleRule r = triangle_rule(d);
    double sum = 0.0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 0.5, 1e-14);
  }
}

TEST(TriangleRule, ExactMonomialsOnReferenceTriangle) {
  for (int d = 0; d <= 12; ++d) {
    TriangleRule r = triangle_rule(d);
    for (int i = 0; i + 0 <= d; ++i) {
      for (int j = 0; i + j <= d; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.points.size(); ++q)
          s += r.weights[q] * std::pow(r.points[q].x(), i) *
               std::pow(r.points[q].y(), j);
        EXPECT_NEAR(s, exact_ref_monomial(i, j), 1e-14)
            << "d=" << d << " i=" << i << " j=" << j;
      }
    }
  }
}

TEST(TriangleRule, MappedRuleIntegratesAreaAndAffine) {
  Vec2 a(0.3, -0.2), b(1.7, 0.4), c(0.9, 2.1);
  MappedRule m = map_to_triangle(triangle_rule(4), a, b, c);
  double area = 0.5 * std::abs((b - a).x() * (c - a).y() -
                               (b - a).y() * (c - a).x());
  double s0 = 0.0;
  Vec2 s1 = Vec2::Zero();
  for (std::size_t q = 0; q < m.points.size(); ++q) {
    s0 += m.weights[q];
    s1 += m.weights[q] * m.points[q];
  }
  EXPECT_NEAR(s0, area, 1e-13);
  // Centroid identity: integral of x over K equals |K| * centroid.
  Vec2 centroid = (a + b + c) / 3.0;
  EXPECT_NEAR(s1.x(), area * centroid.x(), 1e-13);
  EXPECT_NEAR(s1.y(), area * centroid.y(), 1e-13);
}

TEST(TriangleRule, MatchesMonteCarloOnSkewedTriangle) {
  // Independent stochastic oracle for a non-trivial integrand.
  Vec2 a(0.0, 0.0), b(2.0, 0.5), c(0.6, 1.8);
  MappedRule m = map_to_triangle(triangle_rule(8), a, b, c);
  auto f = [](const Vec2& p) { return p.x() * p.x() * p.x() * p.y() * p.y(); };
  double quad = 0.0;
  for (std::size_t q = 0; q < m.points.size(); ++q)
    quad += m.weights[q] * f(m.points[q]);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double area = 0.5 * std::abs((b - a).x() * (c - a).y() -
                               (b - a).y() * (c - a).x());
  double acc = 0.0;
  const int nsamp = 4000000;
  for (int s = 0; s < nsamp; ++s) {
    double u = uni(rng), v = uni(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    acc += f(a + u * (b - a) + v * (c - a));
  }
  double mc = area * acc / nsamp;
  EXPECT_NEAR(quad, mc, 5e-3 * std::abs(quad) + 5e-3);
}
