#include "biglap/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace biglap {

namespace {

void require_padding(const GridComplex& grid, const ScalarField& sdf) {
  for (Index v = 0; v < grid.cell_count(0); ++v)
    if (grid.on_outer_layer(v) && is_inside(sdf.values[v], grid.spacing()))
      throw ConfigError("domain touches the outermost grid layer; insufficient padding");
}

SparseOperator symmetrized(const SparseOperator& a) {
  SparseOperator t = a.transpose();
  SparseOperator s = 0.5 * (a + t);
  s.prune(0.0);
  s.makeCompressed();
  return s;
}

SparseOperator empty_square(Index n) { return SparseOperator(n, n); }

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

}  // namespace

RestrictedComplex build_restricted_complex(const GridComplex& grid, const ScalarField& sdf, Bc bc,
                                           bool with_stars, double eps) {
  if (sdf.values.size() != grid.cell_count(0)) throw ConfigError("SDF is not sampled on this grid");
  const int dim = grid.dim();
  if (bc == Bc::kTangential) {
    ScalarField shifted = dual_shift_field(sdf, grid);
    RestrictedComplex dual = build_restricted_complex(shifted.grid, shifted, Bc::kNormal, with_stars, eps);
    RestrictedComplex out;
    out.grid = dual.grid;
    out.bc = Bc::kTangential;
    out.dim = dim;
    out.spacing = grid.spacing();
    for (int k = 0; k < dim; ++k) out.d.push_back(SparseOperator(dual.d[dim - k - 1].transpose()));
    for (int k = 0; k <= dim; ++k) out.masks.push_back(dual.masks[dim - k]);
    if (with_stars)
      for (int k = 0; k <= dim; ++k) out.star.push_back(dual.star[dim - k].cwiseInverse());
    return out;
  }
  require_padding(grid, sdf);
  RestrictedComplex out;
  out.grid = grid;
  out.bc = Bc::kNormal;
  out.dim = dim;
  out.spacing = grid.spacing();
  for (int k = 0; k <= dim; ++k) out.masks.push_back(classify_cells(grid, sdf, k));
  for (int k = 0; k < dim; ++k) out.d.push_back(restrict_operator(coboundary(grid, k), out.masks[k + 1], out.masks[k]));
  if (with_stars) {
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    for (int k = 0; k <= dim; ++k) {
      const double dual_measure = std::pow(grid.spacing(), dim - k);
      const double floor = std::pow(eps, k);
      Vector s(out.masks[k].size());
      for (Index i = 0; i < s.size(); ++i)
        s[i] = dual_measure / std::max(partial_measure(grid, sdf, grid.cell_of(k, out.masks[k].cells[i])), floor);
      out.star.push_back(std::move(s));
    }
  }
  return out;
}

RestrictedComplex build_closed_complex(const GridComplex& grid, const ScalarField& sdf) {
  RestrictedComplex out;
  out.grid = grid;
  out.bc = Bc::kTangential;
  out.dim = grid.dim();
  out.spacing = grid.spacing();
  for (int k = 0; k <= out.dim; ++k) out.masks.push_back(classify_closed_cells(grid, sdf, k));
  for (int k = 0; k < out.dim; ++k)
    out.d.push_back(restrict_operator(coboundary(grid, k), out.masks[k + 1], out.masks[k]));
  return out;
}

LaplacianSystem assemble(const RestrictedComplex& cx, int k, LaplacianKind kind) {
  if (k < 0 || k > cx.dim) throw ConfigError("Laplacian degree out of range");
  LaplacianSystem sys;
  sys.k = k;
  sys.bc = cx.bc;
  sys.kind = kind;
  const Index n = cx.size(k);
  if (kind != LaplacianKind::kHodge) {
    SparseOperator l = empty_square(n);
    if (k < cx.dim) l += SparseOperator(cx.d[k].transpose() * cx.d[k]);
    if (k > 0) l += SparseOperator(cx.d[k - 1] * cx.d[k - 1].transpose());
    sys.stiffness = symmetrized(l);
    sys.scale = kind == LaplacianKind::kBig ? 1.0 / (cx.spacing * cx.spacing) : 1.0;
    return sys;
  }
  if (!cx.has_stars()) throw ConfigError("Hodge Laplacian needs a complex built with stars");
  for (const auto& s : cx.star)
    if (s.size() && !(s.minCoeff() > 0.0)) throw Error("internal: non-positive Hodge star entry");
  if (k == cx.dim && k > 0) {
    // Congruent pencil (D S^-1 D^T) y = lambda S_k^-1 y with x = S_k^-1 y.
    const Vector& sk = cx.star[k];
    SparseOperator l = cx.d[k - 1] * cx.star[k - 1].cwiseInverse().asDiagonal() * cx.d[k - 1].transpose();
    sys.stiffness = symmetrized(l);
    sys.mass = sk.cwiseInverse();
    sys.recover = sk.cwiseInverse();
    return sys;
  }
  SparseOperator l = empty_square(n);
  if (k < cx.dim) l += SparseOperator(cx.d[k].transpose() * cx.star[k + 1].asDiagonal() * cx.d[k]);
  if (k > 0) {
    const Vector& sk = cx.star[k];
    SparseOperator down = cx.d[k - 1] * cx.star[k - 1].cwiseInverse().asDiagonal() * cx.d[k - 1].transpose();
    l += SparseOperator(sk.asDiagonal() * down * sk.asDiagonal());
  }
  sys.stiffness = symmetrized(l);
  sys.mass = cx.star[k];
  return sys;
}

LaplacianSystem big_laplacian(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc) {
  if (k < 0 || k > grid.dim()) throw ConfigError("Laplacian degree out of range");
  return assemble(build_restricted_complex(grid, sdf, bc, false, 0.0), k, LaplacianKind::kBig);
}

LaplacianSystem hodge_laplacian(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc, double eps) {
  if (k < 0 || k > grid.dim()) throw ConfigError("Laplacian degree out of range");
  return assemble(build_restricted_complex(grid, sdf, bc, true, eps), k, LaplacianKind::kHodge);
}

LaplacianSystem combinatorial_grid_laplacian(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc) {
  if (k < 0 || k > grid.dim()) throw ConfigError("Laplacian degree out of range");
  return assemble(build_restricted_complex(grid, sdf, bc, false, 0.0), k, LaplacianKind::kCombinatorial);
}

LaplacianSystem tangential_system(const GridComplex& grid, const ScalarField& sdf, int k, LaplacianKind kind,
                                  double eps) {
  return laplacian_system(grid, sdf, k, Bc::kTangential, kind, eps);
}

LaplacianSystem laplacian_system(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc,
                                 LaplacianKind kind, double eps) {
  if (k < 0 || k > grid.dim()) throw ConfigError("Laplacian degree out of range");
  const bool stars = kind == LaplacianKind::kHodge;
  return assemble(build_restricted_complex(grid, sdf, bc, stars, eps), k, kind);
}

SpectrumResult solve_spectrum(const LaplacianSystem& system, Index m, const EigenOptions& options) {
  SpectrumResult res = smallest_eigenpairs(system.stiffness, system.mass, m, options);
  res.eigenvalues *= system.scale;
  if (system.recover.size() && res.eigenvectors.size())
    res.eigenvectors = system.recover.asDiagonal() * res.eigenvectors;
  return res;
}

NtcSpectra ntc_split_values(const std::vector<double>& n, const std::vector<double>& t,
                            const std::vector<double>& l1_nonzero, Bc l1_bc, double rel_tol) {
  NtcSpectra out{n, t, {}};
  const auto& scalar = l1_bc == Bc::kNormal ? n : t;
  if (l1_nonzero.empty()) return out;
  std::vector<double> rest = l1_nonzero;
  std::sort(rest.begin(), rest.end());
  const double top = rest.back();
  std::vector<char> used(rest.size(), 0);
  for (double s : scalar) {
    if (s > top || close(s, top, rel_tol)) continue;
    bool found = false;
    for (size_t i = 0; i < rest.size(); ++i)
      if (!used[i] && close(rest[i], s, rel_tol)) {
        used[i] = 1;
        found = true;
        break;
      }
    if (!found) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "inconsistent spectra: scalar eigenvalue " << s << " missing from the 1-form spectrum";
      throw NumericalError(msg.str());
    }
  }
  const double limit = scalar.empty() ? top : scalar.back();
  for (size_t i = 0; i < rest.size(); ++i) {
    if (used[i] || close(rest[i], top, rel_tol)) continue;
    if (rest[i] > limit && !close(rest[i], limit, rel_tol)) continue;
    out.c.push_back(rest[i]);
  }
  return out;
}

NtcSpectra ntc_split(const SpectrumResult& l0n, const SpectrumResult& l0t, const SpectrumResult& l1, Bc l1_bc,
                     double rel_tol) {
  auto nonzero = [](const SpectrumResult& r) {
    std::vector<double> v;
    for (Index i = r.kernel_dim; i < r.eigenvalues.size(); ++i) v.push_back(r.eigenvalues[i]);
    return v;
  };
  return ntc_split_values(nonzero(l0n), nonzero(l0t), nonzero(l1), l1_bc, rel_tol);
}

}  // namespace biglap
