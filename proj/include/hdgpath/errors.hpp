#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hdgpath/cases.hpp"
#include "hdgpath/hdg.hpp"
#include "hdgpath/postprocess.hpp"

namespace hdgpath {

// One solved refinement level of a convergence table.
struct ErrorRow {
  int k = 0;
  double h = 0.0;
  double e_u = 0.0;
  double e_q = 0.0;
  double e_uhat = 0.0;
  double e_ustar = 0.0;
};

// Volume errors over the whole computational domain divided by |D_h|^{1/2}
// (the domains change size under refinement); trace error with per-element
// h_K weights normalized by sum_K h_K |dK|, measured against the L^2
// projection of u onto P^k of each straight edge.
ErrorRow error_norms(const ManufacturedCase& c, const HdgBlocks& blocks,
                     const FieldSolution& sol, const PostprocessedField& star);

// Interface variant: every triangle with at least one interface edge is
// excluded from the sums and the normalizing denominators are dropped.
ErrorRow interface_error_norms(const ManufacturedCase& c,
                               const HdgBlocks& blocks,
                               const FieldSolution& sol,
                               const PostprocessedField& star);

// Picks the variant matching the case.
ErrorRow compute_error_norms(const ManufacturedCase& c,
                             const HdgBlocks& blocks, const FieldSolution& sol,
                             const PostprocessedField& star);

// log(e0/e1)/log(h0/h1); empty when either error vanishes (order undefined).
std::optional<double> eoc(double e_coarse, double e_fine, double h_coarse,
                          double h_fine);

// CSV schema: k,h,e_u,ord_u,e_q,ord_q,e_uhat,ord_uhat,e_ustar,ord_ustar.
// Orders compare consecutive rows; the first row and undefined orders are
// left blank.
void write_report_csv(std::ostream& os, const std::vector<ErrorRow>& rows);

}  // namespace hdgpath
