#include "hdgpath/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgpath {

namespace {

// Legendre polynomial P_n and derivative at t in [-1,1].
std::pair<double, double> legendre(int n, double t) {
  double p0 = 1.0, p1 = t;
  if (n == 0) return {1.0, 0.0};
  for (int j = 2; j <= n; ++j) {
    double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (t * p1 - p0) / (t * t - 1.0);
  return {p1, dp};
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-based initial guess, then Newton.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      std::tie(p, dp) = legendre(n, t);
      double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    std::tie(p, dp) = legendre(n, t);
    double w = 2.0 / ((1.0 - t * t) * dp * dp);
    // Map [-1,1] -> [0,1]; keep nodes ascending.
    rule.nodes[n - 1 - i] = 0.5 * (t + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

TriangleRule triangle_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("triangle_rule: degree < 0");
  // Duffy map (a,b) -> (a(1-b), b).  The integrand gains a factor (1-b),
  // so one extra degree is needed in the b direction.
  int na = degree / 2 + 1;
  int nb = degree / 2 + 2;
  GaussRule ga = gauss_legendre(na);
  GaussRule gb = gauss_legendre(nb);
  TriangleRule rule;
  rule.points.reserve(na * nb);
  rule.weights.reserve(na * nb);
  for (int ib = 0; ib < nb; ++ib) {
    double b = gb.nodes[ib];
    for (int ia = 0; ia < na; ++ia) {
      double a = ga.nodes[ia];
      rule.points.emplace_back(a * (1.0 - b), b);
      rule.weights.push_back(ga.weights[ia] * gb.weights[ib] * (1.0 - b));
    }
  }
  return rule;
}

MappedRule map_to_triangle(const TriangleRule& ref, const Vec2& a,
                           const Vec2& b, const Vec2& c) {
  MappedRule out;
  Mat2 J;
  J.col(0) = b - a;
  J.col(1) = c - a;
  double jac = J.determinant();
  out.points.reserve(ref.points.size());
  out.weights.reserve(ref.points.size());
  for (std::size_t i = 0; i < ref.points.size(); ++i) {
    out.points.push_back(a + J * ref.points[i]);
    out.weights.push_back(std::abs(jac) * ref.weights[i]);
  }
  return out;
}

}  // namespace hdgpath
