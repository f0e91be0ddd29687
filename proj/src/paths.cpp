#include "hdgpath/paths.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hdgpath {

namespace {

struct ProbeTargets {
  std::vector<const Curve*> curves;
  std::vector<int> ids;  // curve_id to record
};

ProbeTargets targets_for(const DomainSpec& spec, EdgeClass cls) {
  ProbeTargets t;
  if (cls == EdgeClass::interface) {
    t.curves = {spec.interface.get()};
    t.ids = {-1};
  } else {
    for (std::size_t i = 0; i < spec.boundary.size(); ++i) {
      t.curves.push_back(spec.boundary[i].get());
      t.ids.push_back(static_cast<int>(i));
    }
  }
  return t;
}

TransferPath closest_point_path(const ProbeTargets& targets, const Vec2& x,
                                const Vec2& fallback_dir) {
  TransferPath p;
  p.x = x;
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < targets.curves.size(); ++i) {
    ClosestPointResult cp = targets.curves[i]->closest_point(x);
    if (cp.distance < best) {
      best = cp.distance;
      p.xbar = cp.point;
      p.length = cp.distance;
      p.curve_id = targets.ids[i];
    }
  }
  p.m = p.length > 1e-14 ? Vec2((p.xbar - x) / p.length) : fallback_dir;
  return p;
}

// Two-sided capped probe along direction n; falls back to closest-point
// projection when the line misses every target curve.
TransferPath normal_probe(const ProbeTargets& targets, const Vec2& x,
                          const Vec2& n, double t_max, int* fallbacks) {
  TransferPath p;
  p.x = x;
  bool found = false;
  double best_abs = std::numeric_limits<double>::max();
  double best_t = 0.0;
  int best_id = -1;
  for (std::size_t i = 0; i < targets.curves.size(); ++i) {
    auto t = targets.curves[i]->line_hit(x, n, t_max);
    if (t && std::abs(*t) < best_abs) {
      found = true;
      best_abs = std::abs(*t);
      best_t = *t;
      best_id = targets.ids[i];
    }
  }
  if (found) {
    p.xbar = x + best_t * n;
    p.length = best_abs;
    p.m = best_t >= 0.0 ? n : Vec2(-n);
    p.curve_id = best_id;
    return p;
  }
  ++*fallbacks;
  return closest_point_path(targets, x, n);
}

bool segments_cross(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                    const Vec2& b1) {
  auto cross = [](const Vec2& u, const Vec2& v) {
    return u.x() * v.y() - u.y() * v.x();
  };
  Vec2 da = a1 - a0, db = b1 - b0;
  double denom = cross(da, db);
  if (std::abs(denom) < 1e-16) return false;
  double t = cross(b0 - a0, db) / denom;
  double s = cross(b0 - a0, da) / denom;
  const double eps = 1e-10;
  return t > eps && t < 1 - eps && s > eps && s < 1 - eps;
}

double edge_cap(const Mesh& mesh, const MeshEdge& e) {
  double h = mesh.tri_diameter(e.tri[0]);
  if (e.tri[1] != -1) h = std::max(h, mesh.tri_diameter(e.tri[1]));
  return h;
}

}  // namespace

PathFamily build_paths(const Mesh& mesh, const DomainSpec& spec,
                       PathStrategy strategy,
                       const std::vector<double>& interior_theta) {
  PathFamily family;
  family.strategy = strategy;
  family.per_edge.resize(mesh.num_edges());

  // P1 starts from one closest-point path per boundary/interface vertex.
  std::vector<TransferPath> vertex_path(mesh.num_vertices());
  std::vector<char> vertex_done(mesh.num_vertices(), 0);

  for (int ei = 0; ei < mesh.num_edges(); ++ei) {
    const MeshEdge& e = mesh.edges[ei];
    if (e.cls == EdgeClass::interior) continue;
    ProbeTargets targets = targets_for(spec, e.cls);
    double h_K = edge_cap(mesh, e);
    Vec2 n = mesh.edge_normal_out(ei, e.tri[0]);

    EdgePaths ep;
    ep.edge = ei;
    ep.theta.push_back(0.0);
    for (double t : interior_theta) ep.theta.push_back(t);
    ep.theta.push_back(1.0);

    if (strategy == PathStrategy::p2) {
      for (double t : ep.theta) {
        ep.paths.push_back(normal_probe(targets, mesh.edge_point(ei, t), n,
                                        2.0 * h_K,
                                        &family.fallback_warnings));
      }
    } else {
      for (int v : {e.a, e.b}) {
        if (!vertex_done[v]) {
          vertex_path[v] = closest_point_path(targets, mesh.vertices[v], n);
          vertex_done[v] = 1;
        }
      }
      TransferPath p0 = vertex_path[e.a];
      TransferPath p1 = vertex_path[e.b];
      if (segments_cross(p0.x, p0.xbar, p1.x, p1.xbar)) {
        // Local repair: fall back to the edge-normal construction.
        p0 = normal_probe(targets, p0.x, n, 2.0 * h_K,
                          &family.fallback_warnings);
        p1 = normal_probe(targets, p1.x, n, 2.0 * h_K,
                          &family.fallback_warnings);
        if (segments_cross(p0.x, p0.xbar, p1.x, p1.xbar))
          throw std::runtime_error(
              "build_paths: unrepairable crossing vertex paths on edge " +
              std::to_string(ei) + " (vertices " + std::to_string(e.a) +
              ", " + std::to_string(e.b) + ")");
        family.notes.push_back("edge " + std::to_string(ei) +
                               ": crossing vertex paths repaired");
      }
      Vec2 d0 = p0.xbar - p0.x, d1 = p1.xbar - p1.x;
      for (double t : ep.theta) {
        TransferPath p;
        p.x = mesh.edge_point(ei, t);
        Vec2 d = (1.0 - t) * d0 + t * d1;
        p.length = d.norm();
        p.m = p.length > 1e-14 ? Vec2(d / p.length) : n;
        p.xbar = p.x + d;
        p.curve_id = t < 0.5 ? p0.curve_id : p1.curve_id;
        ep.paths.push_back(p);
      }
    }

    for (const TransferPath& p : ep.paths) {
      if (p.length >= 10.0 * h_K)
        throw std::runtime_error("build_paths: path of length " +
                                 std::to_string(p.length) + " on edge " +
                                 std::to_string(ei) + " exceeds 10 h_K");
      if (p.length > 2.0 * h_K) ++family.length_warnings;
    }
    family.per_edge[ei] = std::move(ep);
  }
  return family;
}

EdgeChart::EdgeChart(const Mesh& mesh, const DomainSpec& spec,
                     const EdgePaths& ep, bool enforce_on_curve)
    : ep_(&ep), spec_(&spec) {
  if (ep.edge < 0 || ep.paths.size() != ep.theta.size() || ep.paths.size() < 2)
    throw std::runtime_error("EdgeChart: no paths for this edge");
  const Curve* curve = ep.paths[0].curve_id >= 0
                           ? spec.boundary[ep.paths[0].curve_id].get()
                           : spec.interface.get();
  if (enforce_on_curve) {
    for (const TransferPath& p : ep.paths) {
      const Curve* c =
          p.curve_id >= 0 ? spec.boundary[p.curve_id].get() : spec.interface.get();
      double f = std::abs(c->implicit_value(p.xbar));
      if (f > 1e-8 * std::max(1.0, c->scale()))
        throw std::runtime_error(
            "EdgeChart: image off the curve (|F|=" + std::to_string(f) +
            ") on edge " + std::to_string(ep.edge));
    }
  }
  // Fold-back check: consecutive images must advance consistently along
  // the curve tangent.
  int sign = 0;
  for (std::size_t i = 0; i + 1 < ep.paths.size(); ++i) {
    Vec2 a = ep.paths[i].xbar, b = ep.paths[i + 1].xbar;
    Vec2 nrm;
    try {
      nrm = curve->unit_normal(a);
    } catch (const std::exception&) {
      continue;  // off-curve P1 image; skip the tangent test there
    }
    Vec2 tangent(-nrm.y(), nrm.x());
    double s = (b - a).dot(tangent);
    if (std::abs(s) < 1e-14) continue;
    int si = s > 0 ? 1 : -1;
    if (sign == 0) sign = si;
    if (si != sign)
      throw std::runtime_error("EdgeChart: fold-back on edge " +
                               std::to_string(ep.edge));
  }
  (void)mesh;
}

Vec2 EdgeChart::curve_normal(int i) const {
  const TransferPath& p = ep_->paths[i];
  const Curve* c = p.curve_id >= 0 ? spec_->boundary[p.curve_id].get()
                                   : spec_->interface.get();
  return c->unit_normal(p.xbar);
}

EdgeChart edge_chart(const Mesh& mesh, const DomainSpec& spec,
                     const PathFamily& family, int edge) {
  return EdgeChart(mesh, spec, family.per_edge.at(edge),
                   family.strategy == PathStrategy::p2);
}

PathDiagnostics validate_paths(const PathFamily& family, const Mesh& mesh,
                               const DomainSpec& spec) {
  PathDiagnostics d;
  d.fallback_warnings = family.fallback_warnings;
  d.length_warnings = family.length_warnings;
  double scale = 1.0;
  for (const auto& c : spec.boundary) scale = std::max(scale, c->scale());

  for (const EdgePaths& ep : family.per_edge) {
    if (ep.edge < 0) continue;
    double h = edge_cap(mesh, mesh.edges[ep.edge]);
    for (const TransferPath& p : ep.paths) {
      d.max_length_over_h = std::max(d.max_length_over_h, p.length / h);
      if (p.length > 1e-12) {
        Vec2 mid = 0.5 * (p.x + p.xbar);
        if (spec.implicit_value(mid) > 1e-9 * scale) ++d.wrong_region;
      }
    }
  }

  // Crossing count among paths of the same edge and of edges sharing a
  // vertex (the only geometrically meaningful neighbors).
  std::vector<std::vector<int>> at_vertex(mesh.num_vertices());
  for (const EdgePaths& ep : family.per_edge) {
    if (ep.edge < 0) continue;
    at_vertex[mesh.edges[ep.edge].a].push_back(ep.edge);
    at_vertex[mesh.edges[ep.edge].b].push_back(ep.edge);
  }
  auto count_pair = [&](const EdgePaths& ea, const EdgePaths& eb) {
    for (std::size_t i = 0; i < ea.paths.size(); ++i) {
      std::size_t j0 = ea.edge == eb.edge ? i + 1 : 0;
      for (std::size_t j = j0; j < eb.paths.size(); ++j) {
        const TransferPath& pa = ea.paths[i];
        const TransferPath& pb = eb.paths[j];
        if (pa.length < 1e-12 || pb.length < 1e-12) continue;
        if (segments_cross(pa.x, pa.xbar, pb.x, pb.xbar)) ++d.crossings;
      }
    }
  };
  for (const EdgePaths& ep : family.per_edge) {
    if (ep.edge < 0) continue;
    count_pair(ep, ep);
    for (int v : {mesh.edges[ep.edge].a, mesh.edges[ep.edge].b})
      for (int other : at_vertex[v])
        if (other > ep.edge) count_pair(ep, family.per_edge[other]);
  }
  return d;
}

void write_paths_csv(std::ostream& os, const PathFamily& family) {
  os << "edge_id,theta,x,y,xbar,ybar,length\n";
  char buf[160];
  for (const EdgePaths& ep : family.per_edge) {
    if (ep.edge < 0) continue;
    for (std::size_t i = 0; i < ep.theta.size(); ++i) {
      const TransferPath& p = ep.paths[i];
      std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                    ep.edge, ep.theta[i], p.x.x(), p.x.y(), p.xbar.x(),
                    p.xbar.y(), p.length);
      os << buf;
    }
  }
}

void classify_edges(Mesh& mesh, const DomainSpec& spec,
                    PathStrategy strategy) {
  GaussRule inner = gauss_legendre(5);
  PathFamily family = build_paths(mesh, spec, strategy, inner.nodes);
  for (int ei = 0; ei < mesh.num_edges(); ++ei) {
    MeshEdge& e = mesh.edges[ei];
    if (e.tri[1] != -1 || e.cls == EdgeClass::interface) continue;
    const EdgePaths& ep = family.per_edge[ei];
    bool has_d = false, has_n = false;
    for (std::size_t i = 0; i < ep.paths.size(); ++i) {
      // Classification follows the interior quadrature images only; the
      // shared vertices may sit on partition corners.
      if (ep.theta[i] == 0.0 || ep.theta[i] == 1.0) continue;
      const TransferPath& p = ep.paths[i];
      BoundaryPart part = spec.boundary_part(p.curve_id, p.xbar);
      (part == BoundaryPart::dirichlet ? has_d : has_n) = true;
    }
    if (has_d == has_n)
      throw std::runtime_error(
          "classify_edges: edge " + std::to_string(ei) +
          " lands on both Dirichlet and Neumann parts of the boundary");
    e.cls = has_d ? EdgeClass::dirichlet : EdgeClass::neumann;
  }
}

}  // namespace hdgpath
