#pragma once

#include <vector>

#include <Eigen/Core>

#include "hdgpath/hdg.hpp"

namespace hdgpath {

// Element-by-element postprocessed scalar field u* in P^{k+1}(K), split as
// u* = ubar + utilde with utilde of zero element mean.
struct PostprocessedField {
  const Mesh* mesh = nullptr;
  int degree = 0;  // k+1
  std::vector<ElementBasis> bases;
  std::vector<Eigen::VectorXd> coeff;

  double eval(int t, const Vec2& p) const;
  double mean(int t) const;
};

// Solves, per element, the zero-mean Neumann problem
//   (grad utilde, grad w)_K = -(Kinv q_h, grad w)_K  for all w in P^{k+1}(K)
// via a Lagrange multiplier, then shifts by ubar: the mean of u_h for k > 0,
// or the average of the element's own edge traces for k = 0.
PostprocessedField postprocess(const FieldSolution& sol,
                               const HdgBlocks& blocks);

}  // namespace hdgpath
