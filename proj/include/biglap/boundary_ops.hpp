#pragma once

#include "biglap/shapes.hpp"

#include <vector>

namespace biglap {

/// Selection of the k-cells kept under a boundary condition.
struct InclusionMask {
  int k = 0;
  std::vector<char> included;  // per grid k-cell
  std::vector<Index> reindex;  // new index or -1
  std::vector<Index> cells;    // original indices of included cells, ascending

  Index size() const { return static_cast<Index>(cells.size()); }
  Index total() const { return static_cast<Index>(included.size()); }
  static InclusionMask from_flags(int k, std::vector<char> flags);
};

/// Cells with at least one incident gridpoint inside the domain.
InclusionMask classify_cells(const GridComplex& grid, const ScalarField& sdf, int k);

/// Cells whose incident gridpoints are all inside (a closed subcomplex).
InclusionMask classify_closed_cells(const GridComplex& grid, const ScalarField& sdf, int k);

/// Selection matrix P (rows = included cells, one unit entry per row).
SparseOperator projection_matrix(const InclusionMask& mask);

/// P_{k+1} D_k P_k^T.
SparseOperator restricted_coboundary(const SparseOperator& dk, const SparseOperator& pk,
                                     const SparseOperator& pk1);

/// Same result as restricted_coboundary without forming the products.
SparseOperator restrict_operator(const SparseOperator& op, const InclusionMask& rows,
                                 const InclusionMask& cols);

/// Inside portion of a cell: 1 for gridpoints, sub-length / polygon area /
/// tetrahedral volume for edges, faces and cells. Crossings along segments are
/// exact roots of the analytic SDF when the field carries its shape and
/// linear interpolations of the samples otherwise.
double partial_measure(const GridComplex& grid, const ScalarField& sdf, const CellId& cell);

struct DiagonalStar {
  int k = 0;
  Bc bc = Bc::kNormal;
  Vector diag;
};

inline double default_eps(double spacing) { return 1e-4 * spacing; }

/// Diagonal Hodge star over the included cells of the given condition:
/// spacing^(dim-k) / max(partial measure, eps^k) for normal conditions, and
/// the reciprocal of the dual-grid normal star of degree dim-k for tangential.
DiagonalStar hodge_star(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc, double eps);

}  // namespace biglap
