#include "hdgpath/hdg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

namespace hdgpath {

QuadraturePlan quadrature_plan(int k) {
  if (k < 0) throw std::invalid_argument("quadrature_plan: negative degree");
  return {triangle_rule(2 * k + 2), triangle_rule(2 * k + 4),
          gauss_legendre(k + 3)};
}

const char* row_block_name(RowBlock b) {
  switch (b) {
    case RowBlock::vector_eq:
      return "vector_eq";
    case RowBlock::scalar_eq:
      return "scalar_eq";
    case RowBlock::conserv:
      return "conserv";
    case RowBlock::dirichlet:
      return "dirichlet";
    case RowBlock::neumann:
      return "neumann";
    case RowBlock::interface_jump:
      return "interface_jump";
  }
  return "unknown";
}

DiscreteSpace::DiscreteSpace(const Mesh& mesh, int k) : k_(k) {
  if (k < 0) throw std::invalid_argument("DiscreteSpace: negative degree");
  nk_ = ElementBasis::dimension(k);
  nt_ = mesh.num_triangles();
  ne_ = mesh.num_edges();
  bases_.reserve(nt_);
  for (int t = 0; t < nt_; ++t) {
    const auto& v = mesh.triangles[t];
    bases_.emplace_back(k, mesh.vertices[v[0]], mesh.vertices[v[1]],
                        mesh.vertices[v[2]]);
  }
}

Stabilization Stabilization::standard(const Mesh& mesh,
                                      const DomainSpec& spec) {
  Stabilization s;
  s.tau.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(spec.diffusion(mesh.region[t]));
    s.tau[t] = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return s;
}

namespace {

struct EdgeGaussData {
  std::vector<Vec2> x;  // on-edge sample points
  Eigen::MatrixXd mu;   // (k+1) x G trace basis values
};

// int_0^{|sigma|} (Kinv E(q) . m) ds as a row functional over the 2nk flux
// coefficients (qx block then qy block) of the element with basis B.
Eigen::RowVectorXd path_functional(const ElementBasis& B, int nk,
                                   const Mat2& Kinv, const TransferPath& p,
                                   const GaussRule& rule) {
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * nk);
  if (p.length <= 0.0) return r;
  Vec2 km = Kinv * p.m;
  for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
    Eigen::VectorXd wv = B.eval(p.x + (rule.nodes[g] * p.length) * p.m);
    double wgt = rule.weights[g] * p.length;
    r.head(nk) += (wgt * km.x()) * wv.transpose();
    r.tail(nk) += (wgt * km.y()) * wv.transpose();
  }
  return r;
}

const EdgePaths& edge_paths_checked(const PathFamily& paths, int e,
                                    std::size_t samples) {
  if (e >= static_cast<int>(paths.per_edge.size()) ||
      paths.per_edge[e].paths.size() != samples) {
    std::ostringstream os;
    os << "build_blocks: edge " << e
       << " lacks transfer paths at the edge quadrature nodes";
    throw std::runtime_error(os.str());
  }
  return paths.per_edge[e];
}

Vec2 boundary_normal(const DomainSpec& spec, const TransferPath& p) {
  if (p.curve_id < 0) return spec.interface->unit_normal(p.xbar);
  return spec.boundary[p.curve_id]->unit_normal(p.xbar);
}

}  // namespace

HdgBlocks build_blocks(const Mesh& mesh, const DomainSpec& spec,
                       const PathFamily& paths, int k, ProblemData data,
                       Stabilization tau) {
  HdgBlocks B;
  B.mesh = &mesh;
  B.spec = &spec;
  B.paths = &paths;
  B.space = std::make_shared<DiscreteSpace>(mesh, k);
  B.data = std::move(data);
  B.tau = std::move(tau);
  B.quad = quadrature_plan(k);
  if (static_cast<int>(B.tau.tau.size()) != mesh.num_triangles())
    throw std::invalid_argument("build_blocks: stabilization size mismatch");
  for (double t : B.tau.tau)
    if (!(t > 0.0))
      throw std::invalid_argument("build_blocks: nonpositive stabilization");

  const DiscreteSpace& sp = *B.space;
  const int nk = sp.nk();
  const int nped = sp.nedge();
  const GaussRule& er = B.quad.edge;
  const int G = static_cast<int>(er.nodes.size());
  const int nt = mesh.num_triangles();
  const int ne = mesh.num_edges();

  // Classified edges need one path per edge quadrature node (plus the two
  // vertex samples) and the node layout must match this run's Gauss rule.
  for (int e = 0; e < ne; ++e) {
    if (mesh.edges[e].cls == EdgeClass::interior) continue;
    const EdgePaths& ep = edge_paths_checked(paths, e, G + 2);
    for (int g = 0; g < G; ++g)
      if (std::abs(ep.theta[g + 1] - er.nodes[g]) > 1e-12)
        throw std::runtime_error(
            "build_blocks: path samples do not match the edge Gauss rule");
  }

  std::vector<EdgeGaussData> eg(ne);
  for (int e = 0; e < ne; ++e) {
    eg[e].x.resize(G);
    eg[e].mu.resize(nped, G);
    for (int g = 0; g < G; ++g) {
      eg[e].x[g] = mesh.edge_point(e, er.nodes[g]);
      eg[e].mu.col(g) = edge_basis(k, er.nodes[g]);
    }
  }

  // Transferred scalar-jump data per interface edge.
  B.shift_index.assign(ne, -1);
  for (int e = 0; e < ne; ++e) {
    if (mesh.edges[e].cls != EdgeClass::interface) continue;
    const EdgePaths& ep = paths.per_edge[e];
    InterfaceShift sh;
    sh.edge = e;
    sh.side1 = mesh.edges[e].tri[0];
    sh.side2 = mesh.edges[e].tri[1];
    Mat2 kinv1 = spec.diffusion(mesh.region[sh.side1]).inverse();
    Mat2 kinv2 = spec.diffusion(mesh.region[sh.side2]).inverse();
    sh.s_data.resize(G);
    sh.P1.resize(G, 2 * nk);
    sh.P2.resize(G, 2 * nk);
    for (int g = 0; g < G; ++g) {
      const TransferPath& p = ep.paths[g + 1];
      sh.s_data[g] = B.data.jump_scalar ? B.data.jump_scalar(p.xbar) : 0.0;
      sh.P1.row(g) = path_functional(sp.basis(sh.side1), nk, kinv1, p, er);
      sh.P2.row(g) = path_functional(sp.basis(sh.side2), nk, kinv2, p, er);
    }
    B.shift_index[e] = static_cast<int>(B.shifts.size());
    B.shifts.push_back(std::move(sh));
  }

  // Element blocks.
  B.elements.resize(nt);
  for (int t = 0; t < nt; ++t) {
    LocalBlocks& lb = B.elements[t];
    lb.L = Eigen::MatrixXd::Zero(3 * nk, 3 * nk);
    lb.rhs = Eigen::VectorXd::Zero(3 * nk);
    const ElementBasis& bas = sp.basis(t);
    const int region = mesh.region[t];
    Mat2 kinv = spec.diffusion(region).inverse();
    const double tt = B.tau.tau[t];
    const auto& tv = mesh.triangles[t];
    if (mesh.tri_area(t) < 1e-14)
      throw std::runtime_error("build_blocks: degenerate element");

    MappedRule vol = map_to_triangle(B.quad.volume, mesh.vertices[tv[0]],
                                     mesh.vertices[tv[1]], mesh.vertices[tv[2]]);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nk, nk);
    std::array<Eigen::MatrixXd, 2> dmat = {Eigen::MatrixXd::Zero(nk, nk),
                                           Eigen::MatrixXd::Zero(nk, nk)};
    for (std::size_t p = 0; p < vol.points.size(); ++p) {
      Eigen::VectorXd wv = bas.eval(vol.points[p]);
      Eigen::MatrixXd gv = bas.eval_grad(vol.points[p]);
      double wq = vol.weights[p];
      mass += wq * wv * wv.transpose();
      for (int c = 0; c < 2; ++c) dmat[c] += wq * gv.col(c) * wv.transpose();
      double f = B.data.source ? B.data.source(vol.points[p], region) : 0.0;
      lb.rhs.segment(2 * nk, nk) -= (wq * f) * wv;
    }
    for (int c1 = 0; c1 < 2; ++c1)
      for (int c2 = 0; c2 < 2; ++c2)
        lb.L.block(c1 * nk, c2 * nk, nk, nk) += kinv(c1, c2) * mass;
    for (int c = 0; c < 2; ++c) {
      lb.L.block(c * nk, 2 * nk, nk, nk) -= dmat[c];  // -(u, div v)
      lb.L.block(2 * nk, c * nk, nk, nk) -= dmat[c];  // -(q, grad w)
    }

    for (int le = 0; le < 3; ++le) {
      const int e = mesh.tri_edges[t][le];
      const double len = mesh.edge_length(e);
      const Vec2 n = mesh.edge_normal_out(e, t);
      lb.lam[le] = Eigen::MatrixXd::Zero(3 * nk, nped);
      const bool shifted = mesh.edges[e].cls == EdgeClass::interface &&
                           mesh.edges[e].tri[0] == t;
      const InterfaceShift* sh =
          shifted ? &B.shifts[B.shift_index[e]] : nullptr;
      Eigen::MatrixXd* nbq = nullptr;
      if (shifted) {
        lb.neighbor_q.push_back(
            {sh->side2, Eigen::MatrixXd::Zero(3 * nk, 2 * nk)});
        nbq = &lb.neighbor_q.back().Q;
      }
      for (int g = 0; g < G; ++g) {
        Eigen::VectorXd wv = bas.eval(eg[e].x[g]);
        Eigen::VectorXd mug = eg[e].mu.col(g);
        double wgt = er.weights[g] * len;
        for (int c = 0; c < 2; ++c) {
          // <uhat, v.n> on the trace unknown...
          lb.lam[le].block(c * nk, 0, nk, nped) +=
              (wgt * n[c]) * wv * mug.transpose();
          // ...and <q.n, w>.
          lb.L.block(2 * nk, c * nk, nk, nk) +=
              (wgt * n[c]) * wv * wv.transpose();
        }
        lb.L.block(2 * nk, 2 * nk, nk, nk) += (wgt * tt) * wv * wv.transpose();
        lb.lam[le].block(2 * nk, 0, nk, nped) -=
            (wgt * tt) * wv * mug.transpose();
        if (shifted) {
          // uhat = lambda + s_D^h on the side-1 trace: the jump data moves
          // to the right-hand side, the two path integrals couple to the
          // flux DOFs of this element and of the neighbour.
          for (int c = 0; c < 2; ++c) {
            lb.L.block(c * nk, 0, nk, 2 * nk) +=
                (wgt * n[c]) * wv * sh->P1.row(g);
            nbq->block(c * nk, 0, nk, 2 * nk) -=
                (wgt * n[c]) * wv * sh->P2.row(g);
            lb.rhs.segment(c * nk, nk) -= (wgt * n[c] * sh->s_data[g]) * wv;
          }
          lb.L.block(2 * nk, 0, nk, 2 * nk) -= (wgt * tt) * wv * sh->P1.row(g);
          nbq->block(2 * nk, 0, nk, 2 * nk) += (wgt * tt) * wv * sh->P2.row(g);
          lb.rhs.segment(2 * nk, nk) += (wgt * tt * sh->s_data[g]) * wv;
        }
      }
    }
  }

  // Trace rows.
  B.edge_rows.resize(ne);
  for (int e = 0; e < ne; ++e) {
    GlobalRows& gr = B.edge_rows[e];
    const MeshEdge& me = mesh.edges[e];
    const double len = mesh.edge_length(e);
    gr.lam = Eigen::MatrixXd::Zero(nped, nped);
    gr.rhs = Eigen::VectorXd::Zero(nped);
    switch (me.cls) {
      case EdgeClass::interior: {
        // -<qhat.n, mu> summed over both sides; the sign makes the
        // eliminated trace system positive definite.
        gr.block = RowBlock::conserv;
        for (int s = 0; s < 2; ++s) {
          const int t = me.tri[s];
          const double tt = B.tau.tau[t];
          const Vec2 n = mesh.edge_normal_out(e, t);
          const ElementBasis& bas = sp.basis(t);
          Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(nped, 3 * nk);
          for (int g = 0; g < G; ++g) {
            Eigen::VectorXd wv = bas.eval(eg[e].x[g]);
            Eigen::VectorXd mug = eg[e].mu.col(g);
            double wgt = er.weights[g] * len;
            for (int c = 0; c < 2; ++c)
              Z.block(0, c * nk, nped, nk) -=
                  (wgt * n[c]) * mug * wv.transpose();
            Z.block(0, 2 * nk, nped, nk) -= (wgt * tt) * mug * wv.transpose();
            gr.lam += (wgt * tt) * mug * mug.transpose();
          }
          gr.z.push_back({t, std::move(Z)});
        }
        break;
      }
      case EdgeClass::dirichlet: {
        gr.block = RowBlock::dirichlet;
        const int t = me.tri[0];
        const ElementBasis& bas = sp.basis(t);
        Mat2 kinv = spec.diffusion(mesh.region[t]).inverse();
        const EdgePaths& ep = paths.per_edge[e];
        Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(nped, 3 * nk);
        for (int g = 0; g < G; ++g) {
          const TransferPath& p = ep.paths[g + 1];
          Eigen::VectorXd mug = eg[e].mu.col(g);
          double wgt = er.weights[g] * len;
          gr.lam += wgt * mug * mug.transpose();
          Z.block(0, 0, nped, 2 * nk) -=
              wgt * mug * path_functional(bas, nk, kinv, p, er);
          double gd = B.data.dirichlet ? B.data.dirichlet(p.xbar) : 0.0;
          gr.rhs += (wgt * gd) * mug;
        }
        gr.z.push_back({t, std::move(Z)});
        break;
      }
      case EdgeClass::neumann: {
        gr.block = RowBlock::neumann;
        const int t = me.tri[0];
        const ElementBasis& bas = sp.basis(t);
        const EdgePaths& ep = paths.per_edge[e];
        Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(nped, 3 * nk);
        for (int g = 0; g < G; ++g) {
          const TransferPath& p = ep.paths[g + 1];
          const Vec2 phi = p.xbar;
          const Vec2 n = boundary_normal(spec, p);
          Eigen::VectorXd wv = bas.eval(phi);
          Eigen::VectorXd mug = eg[e].mu.col(g);
          double wgt = er.weights[g];  // plain d(theta) measure
          for (int c = 0; c < 2; ++c)
            Z.block(0, c * nk, nped, nk) += (wgt * n[c]) * mug * wv.transpose();
          double gn = B.data.neumann ? B.data.neumann(phi) : 0.0;
          gr.rhs += (wgt * gn) * mug;
        }
        gr.z.push_back({t, std::move(Z)});
        break;
      }
      case EdgeClass::interface: {
        gr.block = RowBlock::interface_jump;
        const int t1 = me.tri[0];
        const int t2 = me.tri[1];
        const EdgePaths& ep = paths.per_edge[e];
        Eigen::MatrixXd Z1 = Eigen::MatrixXd::Zero(nped, 3 * nk);
        Eigen::MatrixXd Z2 = Eigen::MatrixXd::Zero(nped, 3 * nk);
        for (int g = 0; g < G; ++g) {
          const TransferPath& p = ep.paths[g + 1];
          const Vec2 phi = p.xbar;
          const Vec2 n1 = spec.interface->unit_normal(phi);
          Eigen::VectorXd w1 = sp.basis(t1).eval(phi);
          Eigen::VectorXd w2 = sp.basis(t2).eval(phi);
          Eigen::VectorXd mug = eg[e].mu.col(g);
          double wgt = er.weights[g];
          for (int c = 0; c < 2; ++c) {
            Z1.block(0, c * nk, nped, nk) += (wgt * n1[c]) * mug * w1.transpose();
            Z2.block(0, c * nk, nped, nk) -= (wgt * n1[c]) * mug * w2.transpose();
          }
          double sn = B.data.jump_flux ? B.data.jump_flux(phi) : 0.0;
          gr.rhs += (wgt * sn) * mug;
        }
        gr.z.push_back({t1, std::move(Z1)});
        gr.z.push_back({t2, std::move(Z2)});
        break;
      }
    }
  }
  return B;
}

HdgSystem assemble_monolithic(const HdgBlocks& blocks) {
  const DiscreteSpace& sp = *blocks.space;
  const Mesh& mesh = *blocks.mesh;
  const int nk = sp.nk();
  const int nped = sp.nedge();
  const int N = sp.size();

  HdgSystem sys;
  sys.b = Eigen::VectorXd::Zero(N);
  sys.row_block.resize(N);
  sys.row_owner.resize(N);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(N) * 12);

  auto add = [&trips](int r, int c, double v) {
    if (v != 0.0) trips.emplace_back(r, c, v);
  };

  for (int t = 0; t < sp.num_elements(); ++t) {
    const LocalBlocks& lb = blocks.elements[t];
    const int base = sp.q_offset(t);
    for (int i = 0; i < 3 * nk; ++i) {
      sys.row_block[base + i] =
          i < 2 * nk ? RowBlock::vector_eq : RowBlock::scalar_eq;
      sys.row_owner[base + i] = t;
      for (int j = 0; j < 3 * nk; ++j) add(base + i, base + j, lb.L(i, j));
    }
    for (int le = 0; le < 3; ++le) {
      const int col = sp.lambda_offset(mesh.tri_edges[t][le]);
      for (int i = 0; i < 3 * nk; ++i)
        for (int m = 0; m < nped; ++m)
          add(base + i, col + m, lb.lam[le](i, m));
    }
    for (const auto& nc : lb.neighbor_q) {
      const int col = sp.q_offset(nc.element);
      for (int i = 0; i < 3 * nk; ++i)
        for (int j = 0; j < 2 * nk; ++j) add(base + i, col + j, nc.Q(i, j));
    }
    sys.b.segment(base, 3 * nk) = lb.rhs;
  }

  for (int e = 0; e < sp.num_edges(); ++e) {
    const GlobalRows& gr = blocks.edge_rows[e];
    const int r0 = sp.lambda_offset(e);
    for (int m = 0; m < nped; ++m) {
      sys.row_block[r0 + m] = gr.block;
      sys.row_owner[r0 + m] = e;
      for (int m2 = 0; m2 < nped; ++m2) add(r0 + m, r0 + m2, gr.lam(m, m2));
    }
    for (const auto& ec : gr.z) {
      const int c0 = sp.q_offset(ec.element);
      for (int m = 0; m < nped; ++m)
        for (int j = 0; j < 3 * nk; ++j) add(r0 + m, c0 + j, ec.Z(m, j));
    }
    sys.b.segment(r0, nped) = gr.rhs;
  }

  sys.A.resize(N, N);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  sys.A.makeCompressed();
  return sys;
}

namespace {

[[noreturn]] void throw_singular(const Eigen::SparseMatrix<double>& A,
                                 const std::vector<RowBlock>& row_block,
                                 const std::vector<int>& row_owner,
                                 const char* what) {
  std::ostringstream os;
  os << what << ": singular system";
  if (A.rows() <= 6000) {
    Eigen::MatrixXd dense(A);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(dense.transpose());
    lu.setThreshold(1e-10);
    if (lu.dimensionOfKernel() > 0) {
      Eigen::VectorXd y = lu.kernel().col(0);
      int row = 0;
      y.cwiseAbs().maxCoeff(&row);
      os << "; dependent " << row_block_name(row_block[row])
         << " rows (entity " << row_owner[row] << ")";
    }
  }
  throw std::runtime_error(os.str());
}

double refine_and_residual(
    const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu,
    const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
    Eigen::VectorXd& x, double tol) {
  const double bn = b.norm();
  double res = 0.0;
  for (int pass = 0; pass < 3; ++pass) {
    Eigen::VectorXd r = b - A * x;
    res = bn > 0.0 ? r.norm() / bn : r.norm();
    if (res <= tol) return res;
    x += lu.solve(r);
  }
  Eigen::VectorXd r = b - A * x;
  return bn > 0.0 ? r.norm() / bn : r.norm();
}

}  // namespace

FieldSolution solve_monolithic(const HdgBlocks& blocks, const HdgSystem& sys,
                               double tol) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(sys.A);
  if (lu.info() != Eigen::Success)
    throw_singular(sys.A, sys.row_block, sys.row_owner, "solve_monolithic");
  Eigen::VectorXd x = lu.solve(sys.b);
  double res = refine_and_residual(lu, sys.A, sys.b, x, tol);
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "solve_monolithic: residual " << res << " exceeds tolerance " << tol;
    throw std::runtime_error(os.str());
  }
  FieldSolution sol;
  sol.mesh = blocks.mesh;
  sol.space = blocks.space;
  sol.x = std::move(x);
  sol.tau = blocks.tau.tau;
  sol.residual = res;
  return sol;
}

CondensedSystem condense(const HdgBlocks& blocks) {
  const DiscreteSpace& sp = *blocks.space;
  const Mesh& mesh = *blocks.mesh;
  const int nk = sp.nk();
  const int nped = sp.nedge();
  const int nt = sp.num_elements();
  const int ne = sp.num_edges();

  CondensedSystem C;
  C.zc.resize(nt);
  C.dep_edge.resize(nt);
  C.W.resize(nt);

  auto eliminate = [&](int t) {
    const LocalBlocks& lb = blocks.elements[t];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lb.L);
    if (!lu.isInvertible()) {
      std::ostringstream os;
      os << "condense: singular local block on element " << t;
      throw std::runtime_error(os.str());
    }
    Eigen::VectorXd r = lb.rhs;
    std::map<int, Eigen::MatrixXd> dep;
    for (int le = 0; le < 3; ++le) {
      const int e = mesh.tri_edges[t][le];
      auto it = dep.find(e);
      if (it == dep.end())
        dep.emplace(e, lb.lam[le]);
      else
        it->second += lb.lam[le];
    }
    for (const auto& nc : lb.neighbor_q) {
      const int u = nc.element;
      if (C.zc[u].size() == 0)
        throw std::logic_error("condense: neighbour eliminated out of order");
      r -= nc.Q * C.zc[u].head(2 * nk);
      for (std::size_t j = 0; j < C.dep_edge[u].size(); ++j) {
        // z_u = zc_u - W_u lambda, so the neighbour's lambda coupling
        // enters with the opposite sign of its Q block
        Eigen::MatrixXd add = -(nc.Q * C.W[u][j].topRows(2 * nk));
        auto it = dep.find(C.dep_edge[u][j]);
        if (it == dep.end())
          dep.emplace(C.dep_edge[u][j], std::move(add));
        else
          it->second += add;
      }
    }
    C.zc[t] = lu.solve(r);
    for (auto& kv : dep) {
      C.dep_edge[t].push_back(kv.first);
      C.W[t].push_back(lu.solve(kv.second));
    }
  };

  std::vector<int> second_phase;
  for (int t = 0; t < nt; ++t) {
    if (blocks.elements[t].neighbor_q.empty())
      eliminate(t);
    else
      second_phase.push_back(t);
  }
  for (int t : second_phase) eliminate(t);

  std::vector<Eigen::Triplet<double>> trips;
  C.g = Eigen::VectorXd::Zero(nped * ne);
  for (int e = 0; e < ne; ++e) {
    const GlobalRows& gr = blocks.edge_rows[e];
    const int r0 = nped * e;
    C.g.segment(r0, nped) = gr.rhs;
    for (int m = 0; m < nped; ++m)
      for (int m2 = 0; m2 < nped; ++m2)
        if (gr.lam(m, m2) != 0.0)
          trips.emplace_back(r0 + m, r0 + m2, gr.lam(m, m2));
    for (const auto& ec : gr.z) {
      const int t = ec.element;
      C.g.segment(r0, nped) -= ec.Z * C.zc[t];
      for (std::size_t j = 0; j < C.dep_edge[t].size(); ++j) {
        Eigen::MatrixXd M = ec.Z * C.W[t][j];
        const int c0 = nped * C.dep_edge[t][j];
        for (int m = 0; m < nped; ++m)
          for (int m2 = 0; m2 < nped; ++m2)
            if (M(m, m2) != 0.0) trips.emplace_back(r0 + m, c0 + m2, -M(m, m2));
      }
    }
  }
  C.S.resize(nped * ne, nped * ne);
  C.S.setFromTriplets(trips.begin(), trips.end());
  C.S.makeCompressed();
  return C;
}

FieldSolution solve_condensed(const HdgBlocks& blocks, double tol) {
  const DiscreteSpace& sp = *blocks.space;
  const int nk = sp.nk();
  const int nped = sp.nedge();
  const int ne = sp.num_edges();

  CondensedSystem C = condense(blocks);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(C.S);
  if (lu.info() != Eigen::Success) {
    std::vector<RowBlock> rb(nped * ne);
    std::vector<int> owner(nped * ne);
    for (int e = 0; e < ne; ++e)
      for (int m = 0; m < nped; ++m) {
        rb[nped * e + m] = blocks.edge_rows[e].block;
        owner[nped * e + m] = e;
      }
    throw_singular(C.S, rb, owner, "solve_condensed");
  }
  Eigen::VectorXd lambda = lu.solve(C.g);
  double res = refine_and_residual(lu, C.S, C.g, lambda, tol);
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "solve_condensed: residual " << res << " exceeds tolerance " << tol;
    throw std::runtime_error(os.str());
  }

  FieldSolution sol;
  sol.mesh = blocks.mesh;
  sol.space = blocks.space;
  sol.tau = blocks.tau.tau;
  sol.residual = res;
  sol.x = Eigen::VectorXd::Zero(sp.size());
  for (int e = 0; e < ne; ++e)
    sol.x.segment(sp.lambda_offset(e), nped) = lambda.segment(nped * e, nped);
  for (int t = 0; t < sp.num_elements(); ++t) {
    Eigen::VectorXd z = C.zc[t];
    for (std::size_t j = 0; j < C.dep_edge[t].size(); ++j)
      z -= C.W[t][j] * lambda.segment(nped * C.dep_edge[t][j], nped);
    sol.x.segment(sp.q_offset(t), 3 * nk) = z;
  }
  return sol;
}

double FieldSolution::u(int t, const Vec2& p) const {
  const int nk = space->nk();
  return space->basis(t).eval(p).dot(x.segment(space->u_offset(t), nk));
}

Vec2 FieldSolution::q(int t, const Vec2& p) const {
  const int nk = space->nk();
  Eigen::VectorXd wv = space->basis(t).eval(p);
  return Vec2(wv.dot(x.segment(space->q_offset(t), nk)),
              wv.dot(x.segment(space->q_offset(t) + nk, nk)));
}

Eigen::VectorXd FieldSolution::lambda(int e) const {
  return x.segment(space->lambda_offset(e), space->nedge());
}

double FieldSolution::uhat(int e, double theta) const {
  return lambda(e).dot(edge_basis(space->k(), theta));
}

double trace_value(const FieldSolution& sol, const HdgBlocks& blocks, int t,
                   int e, int g) {
  const DiscreteSpace& sp = *sol.space;
  const int nk = sp.nk();
  double trace = sol.uhat(e, blocks.quad.edge.nodes[g]);
  const int si = blocks.shift_index[e];
  if (si >= 0 && blocks.shifts[si].side1 == t) {
    const InterfaceShift& sh = blocks.shifts[si];
    trace += sh.s_data[g] +
             sh.P1.row(g).dot(sol.x.segment(sp.q_offset(sh.side1), 2 * nk)) -
             sh.P2.row(g).dot(sol.x.segment(sp.q_offset(sh.side2), 2 * nk));
  }
  return trace;
}

double flux_trace(const FieldSolution& sol, const HdgBlocks& blocks, int t,
                  int e, int g) {
  const double theta = blocks.quad.edge.nodes[g];
  const Vec2 xg = blocks.mesh->edge_point(e, theta);
  const Vec2 n = blocks.mesh->edge_normal_out(e, t);
  const double trace = trace_value(sol, blocks, t, e, g);
  return sol.q(t, xg).dot(n) + sol.tau[t] * (sol.u(t, xg) - trace);
}

ConservationReport local_conservation(const FieldSolution& sol,
                                      const HdgBlocks& blocks) {
  const Mesh& mesh = *blocks.mesh;
  const int nt = mesh.num_triangles();
  const GaussRule& er = blocks.quad.edge;
  ConservationReport rep;
  rep.residual.resize(nt);
  rep.modified.assign(nt, 0);
  for (int t = 0; t < nt; ++t) {
    double r = 0.0;
    for (int le = 0; le < 3; ++le) {
      const int e = mesh.tri_edges[t][le];
      const EdgeClass cls = mesh.edges[e].cls;
      if (cls == EdgeClass::neumann || cls == EdgeClass::interface)
        rep.modified[t] = 1;
      const double len = mesh.edge_length(e);
      for (std::size_t g = 0; g < er.nodes.size(); ++g)
        r += er.weights[g] * len *
             flux_trace(sol, blocks, t, e, static_cast<int>(g));
    }
    const auto& tv = mesh.triangles[t];
    MappedRule vol =
        map_to_triangle(blocks.quad.volume, mesh.vertices[tv[0]],
                        mesh.vertices[tv[1]], mesh.vertices[tv[2]]);
    for (std::size_t p = 0; p < vol.points.size(); ++p)
      r += vol.weights[p] *
           (blocks.data.source ? blocks.data.source(vol.points[p],
                                                    mesh.region[t])
                               : 0.0);
    rep.residual[t] = r;
    double a = std::abs(r);
    if (rep.modified[t])
      rep.max_modified = std::max(rep.max_modified, a);
    else
      rep.max_standard = std::max(rep.max_standard, a);
  }
  return rep;
}

Eigen::VectorXd project_exact(
    const HdgBlocks& blocks,
    const std::function<double(const Vec2&, int)>& u,
    const std::function<Vec2(const Vec2&, int)>& q) {
  const DiscreteSpace& sp = *blocks.space;
  const Mesh& mesh = *blocks.mesh;
  const int k = sp.k();
  const int nk = sp.nk();
  const int nped = sp.nedge();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sp.size());

  TriangleRule tri = triangle_rule(2 * k + 6);
  GaussRule line = gauss_legendre(k + 6);

  for (int t = 0; t < sp.num_elements(); ++t) {
    const auto& tv = mesh.triangles[t];
    const int region = mesh.region[t];
    const ElementBasis& bas = sp.basis(t);
    MappedRule vol = map_to_triangle(tri, mesh.vertices[tv[0]],
                                     mesh.vertices[tv[1]], mesh.vertices[tv[2]]);
    Eigen::VectorXd cu = Eigen::VectorXd::Zero(nk);
    Eigen::VectorXd cqx = Eigen::VectorXd::Zero(nk);
    Eigen::VectorXd cqy = Eigen::VectorXd::Zero(nk);
    for (std::size_t p = 0; p < vol.points.size(); ++p) {
      Eigen::VectorXd wv = bas.eval(vol.points[p]);
      double wq = vol.weights[p];
      cu += (wq * u(vol.points[p], region)) * wv;
      Vec2 qv = q(vol.points[p], region);
      cqx += (wq * qv.x()) * wv;
      cqy += (wq * qv.y()) * wv;
    }
    x.segment(sp.q_offset(t), nk) = cqx;
    x.segment(sp.q_offset(t) + nk, nk) = cqy;
    x.segment(sp.u_offset(t), nk) = cu;
  }

  for (int e = 0; e < sp.num_edges(); ++e) {
    const MeshEdge& me = mesh.edges[e];
    const int t = me.cls == EdgeClass::interface ? me.tri[1] : me.tri[0];
    const int region = mesh.region[t];
    Eigen::VectorXd cl = Eigen::VectorXd::Zero(nped);
    for (std::size_t g = 0; g < line.nodes.size(); ++g) {
      Vec2 xg = mesh.edge_point(e, line.nodes[g]);
      cl += (line.weights[g] * u(xg, region)) * edge_basis(k, line.nodes[g]);
    }
    x.segment(sp.lambda_offset(e), nped) = cl;
  }
  return x;
}

}  // namespace hdgpath
