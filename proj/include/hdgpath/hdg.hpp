#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "hdgpath/basis.hpp"
#include "hdgpath/mesh.hpp"
#include "hdgpath/paths.hpp"

namespace hdgpath {

// Quadrature used throughout a degree-k run: triangle rule for assembly
// (exact to 2k+2), a raised rule for error integrands, and the k+3-point
// Gauss rule shared by edge integrals, path line integrals and the theta
// integrals of the extrapolated boundary/interface rows.
struct QuadraturePlan {
  TriangleRule volume;
  TriangleRule norms;
  GaussRule edge;
};

QuadraturePlan quadrature_plan(int k);

enum class RowBlock {
  vector_eq,
  scalar_eq,
  conserv,
  dirichlet,
  neumann,
  interface_jump,
};

const char* row_block_name(RowBlock b);

// Problem data callables.  `source` is f with the sign fixed by the flux
// convention q = -K grad u, -div q = f.  Boundary and jump data are
// evaluated at true-curve points delivered by the transfer paths.
struct ProblemData {
  std::function<double(const Vec2&, int region)> source;
  std::function<double(const Vec2&)> dirichlet;
  std::function<double(const Vec2&)> neumann;
  std::function<double(const Vec2&)> jump_scalar;
  std::function<double(const Vec2&)> jump_flux;
};

// Degree-k broken polynomial spaces: [P^k(K)]^2 x P^k(K) per triangle and
// P^k(e) per edge, with one shared trace unknown per edge.  DOF layout:
// element t owns rows/cols [3*nk*t, 3*nk*(t+1)) as (qx, qy, u) coefficient
// groups; edge e owns (k+1) trace DOFs after all element blocks.
class DiscreteSpace {
 public:
  DiscreteSpace(const Mesh& mesh, int k);

  int k() const { return k_; }
  int nk() const { return nk_; }
  int nedge() const { return k_ + 1; }
  int num_elements() const { return nt_; }
  int num_edges() const { return ne_; }

  const ElementBasis& basis(int t) const { return bases_[t]; }

  int q_offset(int t) const { return 3 * nk_ * t; }
  int u_offset(int t) const { return 3 * nk_ * t + 2 * nk_; }
  int lambda_offset(int e) const { return 3 * nk_ * nt_ + nedge() * e; }
  int size() const { return 3 * nk_ * nt_ + nedge() * ne_; }

 private:
  int k_, nk_, nt_, ne_;
  std::vector<ElementBasis> bases_;
};

struct Stabilization {
  std::vector<double> tau;  // per element, positive

  // Paper default: tau|_K = spectral norm of the region's diffusion tensor.
  static Stabilization standard(const Mesh& mesh, const DomainSpec& spec);
};

// Element contribution: local equations for (q|_K, u|_K) and their couplings.
// Row/col order inside L: qx coefficients, qy coefficients, u coefficients.
struct LocalBlocks {
  Eigen::MatrixXd L;                   // 3nk x 3nk
  Eigen::VectorXd rhs;                 // 3nk
  std::array<Eigen::MatrixXd, 3> lam;  // per local edge: 3nk x (k+1)

  // Couplings to a neighbour's flux DOFs created by the transferred scalar
  // jump on side-1 interface elements.
  struct NeighborCoupling {
    int element = -1;
    Eigen::MatrixXd Q;  // 3nk x 2nk
  };
  std::vector<NeighborCoupling> neighbor_q;
};

// Global trace-row block of one edge: conservativity, Dirichlet transfer,
// Neumann extrapolation, or interface flux-jump rows.
struct GlobalRows {
  RowBlock block = RowBlock::conserv;
  Eigen::MatrixXd lam;  // (k+1) x (k+1) coupling to the edge's own trace
  struct ElementCoupling {
    int element = -1;
    Eigen::MatrixXd Z;  // (k+1) x 3nk
  };
  std::vector<ElementCoupling> z;
  Eigen::VectorXd rhs;  // (k+1)
};

// Evaluated transfer data of one interface edge at the k+3 edge Gauss
// samples: s_D^h(theta_g) = s_data[g] + P1.row(g) q1 - P2.row(g) q2.
struct InterfaceShift {
  int edge = -1;
  int side1 = -1, side2 = -1;  // elements
  Eigen::VectorXd s_data;
  Eigen::MatrixXd P1, P2;  // G x 2nk
};

struct HdgBlocks {
  const Mesh* mesh = nullptr;
  const DomainSpec* spec = nullptr;
  const PathFamily* paths = nullptr;
  std::shared_ptr<const DiscreteSpace> space;
  ProblemData data;
  Stabilization tau;
  QuadraturePlan quad;

  std::vector<LocalBlocks> elements;
  std::vector<GlobalRows> edge_rows;        // indexed by edge id
  std::vector<int> shift_index;             // edge id -> index into shifts, -1
  std::vector<InterfaceShift> shifts;
};

// Computes all element and trace-row blocks.  The path family must have been
// built with the k+3 Gauss nodes as interior samples.
HdgBlocks build_blocks(const Mesh& mesh, const DomainSpec& spec,
                       const PathFamily& paths, int k, ProblemData data,
                       Stabilization tau);

struct HdgSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  std::vector<RowBlock> row_block;
  std::vector<int> row_owner;  // element id or edge id per row
};

HdgSystem assemble_monolithic(const HdgBlocks& blocks);

struct FieldSolution {
  const Mesh* mesh = nullptr;
  std::shared_ptr<const DiscreteSpace> space;
  Eigen::VectorXd x;
  std::vector<double> tau;
  double residual = 0.0;

  double u(int t, const Vec2& p) const;
  Vec2 q(int t, const Vec2& p) const;
  Eigen::VectorXd lambda(int e) const;
  double uhat(int e, double theta) const;
};

FieldSolution solve_monolithic(const HdgBlocks& blocks, const HdgSystem& sys,
                               double tol = 1e-10);

// Trace-only Schur system produced by eliminating (q, u) element by element.
struct CondensedSystem {
  Eigen::SparseMatrix<double> S;
  Eigen::VectorXd g;
  // Per element: z = zc - sum_j W[j] * lambda(dep_edge[j]).
  std::vector<Eigen::VectorXd> zc;
  std::vector<std::vector<int>> dep_edge;
  std::vector<std::vector<Eigen::MatrixXd>> W;
};

CondensedSystem condense(const HdgBlocks& blocks);

FieldSolution solve_condensed(const HdgBlocks& blocks, double tol = 1e-10);

// Scalar trace seen by element t on edge e at edge Gauss sample g: lambda,
// shifted by s_D^h on side-1 interface edges.
double trace_value(const FieldSolution& sol, const HdgBlocks& blocks, int t,
                   int e, int g);

// Numerical-flux trace q_hat . n at edge Gauss sample g, seen from element t,
// with the trace shifted by s_D^h on side-1 interface edges.
double flux_trace(const FieldSolution& sol, const HdgBlocks& blocks, int t,
                  int e, int g);

struct ConservationReport {
  Eigen::VectorXd residual;    // per element: <qhat.n,1>_dK + (f,1)_K
  std::vector<char> modified;  // element touches a Neumann or interface edge
  double max_standard = 0.0;
  double max_modified = 0.0;
};

ConservationReport local_conservation(const FieldSolution& sol,
                                      const HdgBlocks& blocks);

// L2 projection of a manufactured solution onto all DOFs; trace DOFs on
// interface edges take the side-2 branch.
Eigen::VectorXd project_exact(
    const HdgBlocks& blocks,
    const std::function<double(const Vec2&, int)>& u,
    const std::function<Vec2(const Vec2&, int)>& q);

}  // namespace hdgpath
