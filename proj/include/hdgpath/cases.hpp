#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hdgpath/geometry.hpp"
#include "hdgpath/hdg.hpp"
#include "hdgpath/mesh.hpp"

namespace hdgpath {

// Whether meshes approximate curved boundaries from strictly inside
// (background grid, O(h) gap) or by interpolating vertices on the curve
// (O(h^2) gap).  Interface cases only support the interpolated family.
enum class FitMode { immersed, interpolated };

// Coordinate reading of the potential-flow solution of case ex5b: evaluate
// the complex potential in the pre-image circle plane (consistent data) or
// literally in polar coordinates of the physical plane.
enum class Ex5Frame { preimage, airfoil };

// A boundary-value or interface problem with a known exact solution: domain
// description, exact fields, right-hand side and boundary/jump data, plus
// the mesh family its convergence study runs on.
//
// Sign conventions: exact_q = -K grad u per region, and data.source stores
// f = -div(exact_q), the right-hand side the assembly consumes.
struct ManufacturedCase {
  std::string label;
  DomainSpec spec;

  std::function<double(const Vec2&, int region)> exact_u;
  std::function<Vec2(const Vec2&, int region)> exact_q;
  ProblemData data;

  PathStrategy strategy = PathStrategy::p2;
  FitMode fit = FitMode::immersed;
  bool has_interface = false;

  // Generator parameter per refinement level (grid resolution n for
  // immersed/snapped meshes, angular segment count m for annuli).
  std::vector<int> levels;

  std::function<Mesh(int level_param, FitMode)> mesher;

  Mesh make_mesh(int level_param, FitMode mode) const {
    return mesher(level_param, mode);
  }
  Mesh make_mesh(int level_param) const { return mesher(level_param, fit); }
};

// Labels: ex1..ex4 (boundary-value runs), ex5a/ex5b (airfoil box), ex6..ex8
// (interface runs).  Throws std::invalid_argument for unknown labels.
ManufacturedCase make_case(const std::string& label,
                           Ex5Frame frame = Ex5Frame::preimage);

const std::vector<std::string>& case_labels();

}  // namespace hdgpath
