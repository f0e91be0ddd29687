#include "hdgpath/vtk.hpp"

#include <cstdio>
#include <ostream>

namespace hdgpath {

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_vtk(std::ostream& os, const FieldSolution& sol,
               const HdgBlocks& blocks, const PostprocessedField& star,
               const std::string& title) {
  const Mesh& mesh = *blocks.mesh;
  const int nt = mesh.num_triangles();

  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << 3 * nt << " double\n";
  for (int t = 0; t < nt; ++t)
    for (int v : mesh.triangles[t]) {
      put(os, mesh.vertices[v].x());
      os << ' ';
      put(os, mesh.vertices[v].y());
      os << " 0\n";
    }

  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (int t = 0; t < nt; ++t)
    os << "3 " << 3 * t << ' ' << 3 * t + 1 << ' ' << 3 * t + 2 << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) os << "5\n";

  os << "POINT_DATA " << 3 * nt << '\n';
  os << "SCALARS u_h double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t)
    for (int v : mesh.triangles[t]) {
      put(os, sol.u(t, mesh.vertices[v]));
      os << '\n';
    }
  os << "SCALARS u_star double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t)
    for (int v : mesh.triangles[t]) {
      put(os, star.eval(t, mesh.vertices[v]));
      os << '\n';
    }
  os << "VECTORS q_h double\n";
  for (int t = 0; t < nt; ++t)
    for (int v : mesh.triangles[t]) {
      Vec2 q = sol.q(t, mesh.vertices[v]);
      put(os, q.x());
      os << ' ';
      put(os, q.y());
      os << " 0\n";
    }
}

}  // namespace hdgpath
