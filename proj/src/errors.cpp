#include "hdgpath/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "hdgpath/basis.hpp"
#include "hdgpath/quadrature.hpp"

namespace hdgpath {

namespace {

bool touches_interface(const Mesh& mesh, int t) {
  for (int i = 0; i < 3; ++i)
    if (mesh.edges[mesh.tri_edges[t][i]].cls == EdgeClass::interface)
      return true;
  return false;
}

ErrorRow norms_impl(const ManufacturedCase& c, const HdgBlocks& blocks,
                    const FieldSolution& sol, const PostprocessedField& star,
                    bool interface_mode) {
  const Mesh& mesh = *blocks.mesh;
  const DiscreteSpace& sp = *blocks.space;
  const int k = sp.k();
  const GaussRule edge_rule = gauss_legendre(k + 6);

  double su = 0, sq = 0, sstar = 0, area = 0;
  double strace = 0, wtrace = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (interface_mode && touches_interface(mesh, t)) continue;
    const int region = mesh.region[t];
    const auto& tri = mesh.triangles[t];
    MappedRule vol =
        map_to_triangle(blocks.quad.norms, mesh.vertices[tri[0]],
                        mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    for (std::size_t g = 0; g < vol.points.size(); ++g) {
      const Vec2& x = vol.points[g];
      const double w = vol.weights[g];
      const double du = sol.u(t, x) - c.exact_u(x, region);
      const Vec2 dq = sol.q(t, x) - c.exact_q(x, region);
      const double ds = star.eval(t, x) - c.exact_u(x, region);
      su += w * du * du;
      sq += w * dq.squaredNorm();
      sstar += w * ds * ds;
      area += w;
    }

    const double hk = mesh.tri_diameter(t);
    for (int i = 0; i < 3; ++i) {
      const int ge = mesh.tri_edges[t][i];
      const double len = mesh.edge_length(ge);
      Eigen::VectorXd cm = Eigen::VectorXd::Zero(k + 1);
      for (std::size_t g = 0; g < edge_rule.nodes.size(); ++g) {
        const double theta = edge_rule.nodes[g];
        cm += edge_rule.weights[g] *
              c.exact_u(mesh.edge_point(ge, theta), region) *
              edge_basis(k, theta);
      }
      strace += hk * len * (cm - sol.lambda(ge)).squaredNorm();
      wtrace += hk * len;
    }
  }

  ErrorRow row;
  row.k = k;
  row.h = mesh.h_max();
  if (!interface_mode) {
    su /= area;
    sq /= area;
    sstar /= area;
    strace /= wtrace;
  }
  row.e_u = std::sqrt(su);
  row.e_q = std::sqrt(sq);
  row.e_ustar = std::sqrt(sstar);
  row.e_uhat = std::sqrt(strace);
  return row;
}

std::string fmt_err(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6E", v);
  return buf;
}

std::string fmt_ord(const std::optional<double>& o) {
  if (!o) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *o);
  return buf;
}

}  // namespace

ErrorRow error_norms(const ManufacturedCase& c, const HdgBlocks& blocks,
                     const FieldSolution& sol,
                     const PostprocessedField& star) {
  return norms_impl(c, blocks, sol, star, false);
}

ErrorRow interface_error_norms(const ManufacturedCase& c,
                               const HdgBlocks& blocks,
                               const FieldSolution& sol,
                               const PostprocessedField& star) {
  return norms_impl(c, blocks, sol, star, true);
}

ErrorRow compute_error_norms(const ManufacturedCase& c,
                             const HdgBlocks& blocks, const FieldSolution& sol,
                             const PostprocessedField& star) {
  return norms_impl(c, blocks, sol, star, c.has_interface);
}

std::optional<double> eoc(double e_coarse, double e_fine, double h_coarse,
                          double h_fine) {
  if (e_coarse <= 0.0 || e_fine <= 0.0 || h_coarse == h_fine)
    return std::nullopt;
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

void write_report_csv(std::ostream& os, const std::vector<ErrorRow>& rows) {
  os << "k,h,e_u,ord_u,e_q,ord_q,e_uhat,ord_uhat,e_ustar,ord_ustar\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ErrorRow& r = rows[i];
    std::optional<double> ou, oq, ot, os_;
    if (i > 0) {
      const ErrorRow& p = rows[i - 1];
      ou = eoc(p.e_u, r.e_u, p.h, r.h);
      oq = eoc(p.e_q, r.e_q, p.h, r.h);
      ot = eoc(p.e_uhat, r.e_uhat, p.h, r.h);
      os_ = eoc(p.e_ustar, r.e_ustar, p.h, r.h);
    }
    os << r.k << ',' << fmt_err(r.h) << ',' << fmt_err(r.e_u) << ','
       << fmt_ord(ou) << ',' << fmt_err(r.e_q) << ',' << fmt_ord(oq) << ','
       << fmt_err(r.e_uhat) << ',' << fmt_ord(ot) << ',' << fmt_err(r.e_ustar)
       << ',' << fmt_ord(os_) << '\n';
  }
}

}  // namespace hdgpath
