#pragma once

#include <Eigen/Dense>

#include "hdgpath/quadrature.hpp"

namespace hdgpath {

// L2-orthonormal polynomial basis of degree k on one physical triangle,
// built from centered and scaled monomials via a Cholesky factorization of
// the local mass matrix.  Evaluations are valid at any point of the plane,
// which is what the extension operator E^K relies on.
class ElementBasis {
 public:
  ElementBasis() = default;
  ElementBasis(int k, const Vec2& a, const Vec2& b, const Vec2& c);

  int degree() const { return k_; }
  int size() const { return nk_; }

  Eigen::VectorXd eval(const Vec2& x) const;
  // Rows: basis functions; columns: d/dx, d/dy.
  Eigen::MatrixXd eval_grad(const Vec2& x) const;

  static int dimension(int k) { return (k + 1) * (k + 2) / 2; }

 private:
  Eigen::VectorXd monomials(const Vec2& x) const;
  Eigen::MatrixXd monomial_grads(const Vec2& x) const;

  int k_ = -1;
  int nk_ = 0;
  Vec2 center_ = Vec2::Zero();
  double scale_ = 1.0;
  std::vector<std::pair<int, int>> expo_;
  Eigen::MatrixXd coeff_;  // row i: coefficients of phi_i in the monomials
};

// Orthonormal basis on an edge parameterized over [0,1]: shifted Legendre
// polynomials with int_0^1 L_i L_j dtheta = delta_ij.
Eigen::VectorXd edge_basis(int k, double theta);

}  // namespace hdgpath
