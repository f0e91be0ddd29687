#include "hdgpath/postprocess.hpp"

#include <stdexcept>

#include <Eigen/Dense>

namespace hdgpath {

double PostprocessedField::eval(int t, const Vec2& p) const {
  return bases[t].eval(p).dot(coeff[t]);
}

double PostprocessedField::mean(int t) const {
  const auto& tv = mesh->triangles[t];
  MappedRule vol =
      map_to_triangle(triangle_rule(2 * degree), mesh->vertices[tv[0]],
                      mesh->vertices[tv[1]], mesh->vertices[tv[2]]);
  double s = 0.0;
  for (std::size_t p = 0; p < vol.points.size(); ++p)
    s += vol.weights[p] * eval(t, vol.points[p]);
  return s / mesh->tri_area(t);
}

PostprocessedField postprocess(const FieldSolution& sol,
                               const HdgBlocks& blocks) {
  const Mesh& mesh = *blocks.mesh;
  const DiscreteSpace& sp = *blocks.space;
  const int k = sp.k();
  const int nk1 = ElementBasis::dimension(k + 1);
  const GaussRule& er = blocks.quad.edge;

  PostprocessedField out;
  out.mesh = &mesh;
  out.degree = k + 1;
  out.bases.reserve(mesh.num_triangles());
  out.coeff.resize(mesh.num_triangles());

  TriangleRule tri = triangle_rule(2 * k + 2);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tv = mesh.triangles[t];
    out.bases.emplace_back(k + 1, mesh.vertices[tv[0]], mesh.vertices[tv[1]],
                           mesh.vertices[tv[2]]);
    const ElementBasis& B = out.bases.back();
    Mat2 kinv = blocks.spec->diffusion(mesh.region[t]).inverse();
    MappedRule vol = map_to_triangle(tri, mesh.vertices[tv[0]],
                                     mesh.vertices[tv[1]], mesh.vertices[tv[2]]);

    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(nk1 + 1, nk1 + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nk1 + 1);
    Eigen::VectorXd ones = Eigen::VectorXd::Zero(nk1);
    double umean = 0.0;
    for (std::size_t p = 0; p < vol.points.size(); ++p) {
      Eigen::MatrixXd g = B.eval_grad(vol.points[p]);
      double wq = vol.weights[p];
      sys.topLeftCorner(nk1, nk1) += wq * g * g.transpose();
      rhs.head(nk1) -= wq * g * (kinv * sol.q(t, vol.points[p]));
      ones += wq * B.eval(vol.points[p]);
      if (k > 0) umean += wq * sol.u(t, vol.points[p]);
    }
    sys.block(0, nk1, nk1, 1) = ones;
    sys.block(nk1, 0, 1, nk1) = ones.transpose();

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (!lu.isInvertible())
      throw std::runtime_error("postprocess: singular local system");
    Eigen::VectorXd c = lu.solve(rhs).head(nk1);

    double ubar;
    if (k > 0) {
      ubar = umean / mesh.tri_area(t);
    } else {
      // Average of the element's own edge traces, including the transferred
      // jump on the side-1 face of interface edges.
      ubar = 0.0;
      for (int le = 0; le < 3; ++le) {
        const int e = mesh.tri_edges[t][le];
        double trace = 0.0;
        for (std::size_t g = 0; g < er.nodes.size(); ++g)
          trace += er.weights[g] *
                   trace_value(sol, blocks, t, e, static_cast<int>(g));
        ubar += trace / 3.0;
      }
    }
    out.coeff[t] = c + ubar * ones;
  }
  return out;
}

}  // namespace hdgpath
