#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hdgpath/mesh.hpp"

namespace hdgpath {

// One transfer segment from a point of the computational boundary (or of
// the straight interface) to the true curve.
struct TransferPath {
  Vec2 x = Vec2::Zero();     // origin on the mesh edge
  Vec2 xbar = Vec2::Zero();  // endpoint on the curve
  Vec2 m = Vec2::Zero();     // unit direction from x toward xbar
  double length = 0.0;
  int curve_id = -1;  // index into DomainSpec::boundary, or -1 = interface
};

struct EdgePaths {
  int edge = -1;
  std::vector<double> theta;        // 0, interior samples, 1
  std::vector<TransferPath> paths;  // one per theta
};

struct PathFamily {
  PathStrategy strategy = PathStrategy::p2;
  std::vector<EdgePaths> per_edge;  // indexed by edge id; empty when interior
  int fallback_warnings = 0;        // ray misses resolved by projection
  int length_warnings = 0;          // paths longer than 2 h_K
  std::vector<std::string> notes;
};

// Builds paths for every Dirichlet, Neumann and interface edge at both
// vertices plus the given interior sample points (ascending, in (0,1)).
PathFamily build_paths(const Mesh& mesh, const DomainSpec& spec,
                       PathStrategy strategy,
                       const std::vector<double>& interior_theta);

// Validated per-edge view: the chart phi(theta_i) = xbar_i of the curve
// segment induced by the paths, with curve normals at the images.
class EdgeChart {
 public:
  EdgeChart(const Mesh& mesh, const DomainSpec& spec, const EdgePaths& ep,
            bool enforce_on_curve);

  int samples() const { return static_cast<int>(ep_->theta.size()); }
  double theta(int i) const { return ep_->theta[i]; }
  const TransferPath& path(int i) const { return ep_->paths[i]; }
  Vec2 phi(int i) const { return ep_->paths[i].xbar; }
  // Outward unit normal of the true curve at phi(i).
  Vec2 curve_normal(int i) const;

 private:
  const EdgePaths* ep_;
  const DomainSpec* spec_;
};

EdgeChart edge_chart(const Mesh& mesh, const DomainSpec& spec,
                     const PathFamily& family, int edge);

struct PathDiagnostics {
  double max_length_over_h = 0.0;
  int crossings = 0;
  int wrong_region = 0;  // path midpoints clearly outside the domain
  int fallback_warnings = 0;
  int length_warnings = 0;
};

PathDiagnostics validate_paths(const PathFamily& family, const Mesh& mesh,
                               const DomainSpec& spec);

// CSV dump: edge_id,theta,x,y,xbar,ybar,length
void write_paths_csv(std::ostream& os, const PathFamily& family);

}  // namespace hdgpath
