#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hdgpath {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Gauss-Legendre rule on [0,1]; n points integrate polynomials of degree
// 2n-1 exactly.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Quadrature on the reference triangle {x >= 0, y >= 0, x + y <= 1},
// built as a collapsed tensor product of Gauss rules.  Exact for the
// requested total degree, all weights positive.
struct TriangleRule {
  std::vector<Vec2> points;
  std::vector<double> weights;  // sum to 1/2
};

TriangleRule triangle_rule(int degree);

// Affine image of a reference rule on the physical triangle (a, b, c).
struct MappedRule {
  std::vector<Vec2> points;
  std::vector<double> weights;  // sum to |K|
};

MappedRule map_to_triangle(const TriangleRule& ref, const Vec2& a,
                           const Vec2& b, const Vec2& c);

}  // namespace hdgpath
