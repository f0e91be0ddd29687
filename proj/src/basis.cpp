#include "hdgpath/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgpath {

ElementBasis::ElementBasis(int k, const Vec2& a, const Vec2& b,
                           const Vec2& c) {
  if (k < 0) throw std::invalid_argument("ElementBasis: k < 0");
  k_ = k;
  nk_ = dimension(k);
  center_ = (a + b + c) / 3.0;
  scale_ = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  expo_.reserve(nk_);
  for (int d = 0; d <= k; ++d)
    for (int i = d; i >= 0; --i) expo_.emplace_back(i, d - i);

  MappedRule rule = map_to_triangle(triangle_rule(2 * k + 2), a, b, c);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nk_, nk_);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    Eigen::VectorXd m = monomials(rule.points[q]);
    mass.noalias() += rule.weights[q] * m * m.transpose();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("ElementBasis: singular mass matrix (degenerate triangle?)");
  coeff_ = llt.matrixL().solve(Eigen::MatrixXd::Identity(nk_, nk_));
}

Eigen::VectorXd ElementBasis::monomials(const Vec2& x) const {
  Vec2 s = (x - center_) / scale_;
  Eigen::VectorXd powx(k_ + 1), powy(k_ + 1);
  powx[0] = powy[0] = 1.0;
  for (int i = 1; i <= k_; ++i) {
    powx[i] = powx[i - 1] * s.x();
    powy[i] = powy[i - 1] * s.y();
  }
  Eigen::VectorXd m(nk_);
  for (int j = 0; j < nk_; ++j) m[j] = powx[expo_[j].first] * powy[expo_[j].second];
  return m;
}

Eigen::MatrixXd ElementBasis::monomial_grads(const Vec2& x) const {
  Vec2 s = (x - center_) / scale_;
  Eigen::VectorXd powx(k_ + 1), powy(k_ + 1);
  powx[0] = powy[0] = 1.0;
  for (int i = 1; i <= k_; ++i) {
    powx[i] = powx[i - 1] * s.x();
    powy[i] = powy[i - 1] * s.y();
  }
  Eigen::MatrixXd g(nk_, 2);
  for (int j = 0; j < nk_; ++j) {
    auto [ix, iy] = expo_[j];
    g(j, 0) = ix == 0 ? 0.0 : ix * powx[ix - 1] * powy[iy] / scale_;
    g(j, 1) = iy == 0 ? 0.0 : iy * powx[ix] * powy[iy - 1] / scale_;
  }
  return g;
}

Eigen::VectorXd ElementBasis::eval(const Vec2& x) const {
  return coeff_ * monomials(x);
}

Eigen::MatrixXd ElementBasis::eval_grad(const Vec2& x) const {
  return coeff_ * monomial_grads(x);
}

Eigen::VectorXd edge_basis(int k, double theta) {
  Eigen::VectorXd v(k + 1);
  double t = 2.0 * theta - 1.0;
  double p0 = 1.0, p1 = t;
  for (int n = 0; n <= k; ++n) {
    double pn;
    if (n == 0)
      pn = p0;
    else if (n == 1)
      pn = p1;
    else {
      pn = ((2.0 * n - 1.0) * t * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = pn;
    }
    v[n] = std::sqrt(2.0 * n + 1.0) * pn;
  }
  return v;
}

}  // namespace hdgpath
