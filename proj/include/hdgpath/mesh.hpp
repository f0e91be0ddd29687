#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hdgpath/geometry.hpp"

namespace hdgpath {

enum class EdgeClass : std::uint8_t {
  interior = 0,
  dirichlet = 1,
  neumann = 2,
  interface = 3,
};

struct MeshEdge {
  int a = -1, b = -1;  // vertex ids with a < b; theta runs from a to b
  EdgeClass cls = EdgeClass::interior;
  // Adjacent triangles; tri[1] = -1 on the boundary.  For interface edges
  // tri[0] is the region-1 side.
  std::array<int, 2> tri{-1, -1};
};

// Straight-sided triangulation with region labels and classified edges.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<int> region;                    // 1 or 2 per triangle
  std::vector<MeshEdge> edges;
  // tri_edges[t][i] is the edge between local vertices i and (i+1)%3.
  std::vector<std::array<int, 3>> tri_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  double tri_area(int t) const;
  double tri_diameter(int t) const;
  Vec2 centroid(int t) const;
  double edge_length(int e) const;
  Vec2 edge_point(int e, double theta) const;
  // Unit normal of edge e pointing out of triangle t.
  Vec2 edge_normal_out(int e, int t) const;
  double h_max() const;
  // Triangle adjacent to t across edge e, or -1.
  int neighbor(int t, int e) const;
};

// Fills edges/tri_edges from the triangle list, enforces CCW orientation,
// and marks edges between different regions as interface edges.  Boundary
// edges default to Dirichlet until classified.
void build_connectivity(Mesh& mesh);

// Structural invariants: CCW positive areas, consistent adjacency, boundary
// edges non-interior, regions changing only across interface edges.
void validate_mesh(const Mesh& mesh);

Mesh generate_square_grid(const Vec2& lo, const Vec2& hi, int nx, int ny);

// Background grid over spec.bbox; keeps triangles whose vertices and edge
// midpoints are strictly inside the domain.
Mesh generate_immersed(const DomainSpec& spec, int n);

// Structured polar mesh with all ring vertices exactly on circles.
Mesh generate_annulus(const Vec2& center, double r_in, double r_out, int m);

enum class SnapMode {
  keep_both,     // interface mesh: both regions stay
  drop_region1,  // the curve's negative side is a hole
};

// Background grid with vertices of sign-crossing edges moved onto the curve,
// so the curve is approximated by a chain of mesh edges.
Mesh generate_snapped(const Vec2& lo, const Vec2& hi, int n,
                      const Curve& curve, SnapMode mode);

enum class PathStrategy { p1, p2 };

// Assigns Dirichlet/Neumann classes to boundary edges from where their
// transfer paths land on the boundary partition.  Throws if the samples of
// one edge land on differently-classified parts.
void classify_edges(Mesh& mesh, const DomainSpec& spec,
                    PathStrategy strategy);

}  // namespace hdgpath
