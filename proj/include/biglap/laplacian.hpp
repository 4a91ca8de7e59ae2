#pragma once

#include "biglap/boundary_ops.hpp"
#include "biglap/eigensolver.hpp"

#include <vector>

namespace biglap {

/// Coboundaries and stars of the cells kept under one boundary condition.
///
/// For normal conditions the cells are primal cells of `grid`. Tangential
/// k-forms live on the dual grid (grid.dual()) as normal (dim-k)-cells of the
/// half-shifted field; d[k] is then the transposed dual coboundary of degree
/// dim-k-1 and star[k] the reciprocal of the dual normal star of degree dim-k.
struct RestrictedComplex {
  GridComplex grid;  // grid whose cells are indexed (the dual grid when tangential)
  Bc bc = Bc::kNormal;
  int dim = 0;
  double spacing = 0.0;
  std::vector<SparseOperator> d;     // d[k]: k-forms -> (k+1)-forms, k < dim
  std::vector<Vector> star;          // star[k], k = 0..dim; empty when not built
  std::vector<InclusionMask> masks;  // masks[k]: cells carrying k-forms (on `grid`)

  Index size(int k) const { return masks[k].size(); }
  bool has_stars() const { return !star.empty(); }
};

RestrictedComplex build_restricted_complex(const GridComplex& grid, const ScalarField& sdf, Bc bc,
                                           bool with_stars, double eps);

/// Complex of the cells whose gridpoints are all inside, with identity stars
/// left out (combinatorial use only).
RestrictedComplex build_closed_complex(const GridComplex& grid, const ScalarField& sdf);

/// L x = lambda * mass x, eigenvalues reported times `scale`. When `recover`
/// is non-empty the pencil was solved in a congruent form and the eigenvector
/// of the stated problem is recover .* y.
struct LaplacianSystem {
  int k = 0;
  Bc bc = Bc::kNormal;
  LaplacianKind kind = LaplacianKind::kBig;
  SparseOperator stiffness;
  Vector mass;  // empty means identity
  double scale = 1.0;
  Vector recover;

  Index size() const { return stiffness.rows(); }
};

LaplacianSystem assemble(const RestrictedComplex& complex, int k, LaplacianKind kind);

LaplacianSystem big_laplacian(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc);
LaplacianSystem hodge_laplacian(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc, double eps);
LaplacianSystem combinatorial_grid_laplacian(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc);

/// L_{k,t} assembled as L_{dim-k,n} on the half-shifted field.
LaplacianSystem tangential_system(const GridComplex& grid, const ScalarField& sdf, int k, LaplacianKind kind,
                                  double eps);

LaplacianSystem laplacian_system(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc,
                                 LaplacianKind kind, double eps);

/// Eigenvalues times the system scale, eigenvectors mapped back to the stated
/// problem, kernel dimension filled in.
SpectrumResult solve_spectrum(const LaplacianSystem& system, Index m, const EigenOptions& options = {});

struct NtcSpectra {
  std::vector<double> n;
  std::vector<double> t;
  std::vector<double> c;
};

/// Splits four grid spectra into the three singular spectra. `l1_bc` states
/// the condition of the 1-form spectrum; its scalar part (N for normal, T for
/// tangential) is removed by multiset difference at relative tolerance
/// `rel_tol`. Zeros are the first kernel_dim entries of each result.
NtcSpectra ntc_split(const SpectrumResult& l0n, const SpectrumResult& l0t, const SpectrumResult& l1, Bc l1_bc,
                     double rel_tol = 1e-6);

/// Same on raw ascending nonzero lists.
NtcSpectra ntc_split_values(const std::vector<double>& n, const std::vector<double>& t,
                            const std::vector<double>& l1_nonzero, Bc l1_bc, double rel_tol = 1e-6);

}  // namespace biglap
