#pragma once

#include <iosfwd>
#include <string>

#include "hdgpath/mesh.hpp"

namespace hdgpath {

// Plain-text mesh format.  First data line: "nv nt ne"; then nv vertex
// lines "x y" (full precision), nt triangle lines "i j k region" and ne
// edge lines "a b class" with class 0=interior, 1=dirichlet, 2=neumann,
// 3=interface.  Lines starting with '#' are comments.
void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh(const std::string& path, const Mesh& mesh);

Mesh read_mesh(std::istream& is, const std::string& name = "<stream>");
Mesh read_mesh(const std::string& path);

}  // namespace hdgpath
