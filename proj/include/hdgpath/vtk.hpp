#pragma once

#include <iosfwd>
#include <string>

#include "hdgpath/hdg.hpp"
#include "hdgpath/postprocess.hpp"

namespace hdgpath {

// Legacy ASCII unstructured-grid dump with one point per cell corner, so
// the broken fields stay discontinuous across edges.  Point data: scalars
// u_h and u_star, vector q_h (z component zero).
void write_vtk(std::ostream& os, const FieldSolution& sol,
               const HdgBlocks& blocks, const PostprocessedField& star,
               const std::string& title);

}  // namespace hdgpath
