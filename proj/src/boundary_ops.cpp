#include "biglap/boundary_ops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

namespace biglap {

namespace {

// Fraction along p_in -> p_out where the domain is left.
double crossing_fraction(const ScalarField& sdf, const Point& p_in, double f_in, const Point& p_out,
                         double f_out) {
  if (sdf.source) {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 64 && hi - lo > 1e-15; ++it) {
      double mid = 0.5 * (lo + hi);
      if (sdf_eval(*sdf.source, p_in + mid * (p_out - p_in)) <= 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  double denom = f_in - f_out;
  if (denom >= 0.0) return 1.0;
  return std::clamp(f_in / denom, 0.0, 1.0);
}

Point crossing_point(const ScalarField& sdf, const Point& p_in, double f_in, const Point& p_out,
                     double f_out) {
  return p_in + crossing_fraction(sdf, p_in, f_in, p_out, f_out) * (p_out - p_in);
}

double tet_volume(const Point& a, const Point& b, const Point& c, const Point& d) {
  Eigen::Matrix3d m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  m.col(2) = d - a;
  return std::abs(m.determinant()) / 6.0;
}

double inside_tet_volume(const ScalarField& sdf, const std::array<Point, 4>& p, const std::array<double, 4>& f) {
  const double h = sdf.grid.spacing();
  std::array<int, 4> in{};
  std::array<int, 4> out{};
  int n_in = 0;
  int n_out = 0;
  for (int i = 0; i < 4; ++i) {
    if (!is_outside(f[i], h))
      in[n_in++] = i;
    else
      out[n_out++] = i;
  }
  auto cut = [&](int i, int o) { return crossing_point(sdf, p[i], f[i], p[o], f[o]); };
  switch (n_in) {
    case 0:
      return 0.0;
    case 4:
      return tet_volume(p[0], p[1], p[2], p[3]);
    case 1: {
      int a = in[0];
      return tet_volume(p[a], cut(a, out[0]), cut(a, out[1]), cut(a, out[2]));
    }
    case 3: {
      int d = out[0];
      return tet_volume(p[0], p[1], p[2], p[3]) -
             tet_volume(p[d], cut(in[0], d), cut(in[1], d), cut(in[2], d));
    }
    default: {
      // Wedge with triangles (a, ac, ad) and (b, bc, bd) and lateral edges
      // a-b, ac-bc, ad-bd.
      int a = in[0], b = in[1], c = out[0], d = out[1];
      Point a0 = p[a], a1 = cut(a, c), a2 = cut(a, d);
      Point b0 = p[b], b1 = cut(b, c), b2 = cut(b, d);
      return tet_volume(a0, a1, a2, b0) + tet_volume(a1, a2, b0, b1) + tet_volume(a2, b0, b1, b2);
    }
  }
}

void require_field(const GridComplex& grid, const ScalarField& sdf) {
  if (sdf.values.size() != grid.cell_count(0)) throw ConfigError("SDF is not sampled on this grid");
}

}  // namespace

InclusionMask InclusionMask::from_flags(int k, std::vector<char> flags) {
  InclusionMask mask;
  mask.k = k;
  mask.included = std::move(flags);
  mask.reindex.assign(mask.included.size(), -1);
  for (size_t i = 0; i < mask.included.size(); ++i)
    if (mask.included[i]) {
      mask.reindex[i] = static_cast<Index>(mask.cells.size());
      mask.cells.push_back(static_cast<Index>(i));
    }
  return mask;
}

InclusionMask classify_cells(const GridComplex& grid, const ScalarField& sdf, int k) {
  require_field(grid, sdf);
  if (k < 0 || k > grid.dim()) throw ConfigError("cell degree out of range");
  std::vector<char> flags(grid.cell_count(k), 0);
  for (Index c = 0; c < grid.cell_count(k); ++c)
    for (Index v : grid.cell_vertices(grid.cell_of(k, c)))
      if (is_inside(sdf.values[v], grid.spacing())) {
        flags[c] = 1;
        break;
      }
  return InclusionMask::from_flags(k, std::move(flags));
}

InclusionMask classify_closed_cells(const GridComplex& grid, const ScalarField& sdf, int k) {
  require_field(grid, sdf);
  if (k < 0 || k > grid.dim()) throw ConfigError("cell degree out of range");
  std::vector<char> flags(grid.cell_count(k), 0);
  for (Index c = 0; c < grid.cell_count(k); ++c) {
    bool all = true;
    for (Index v : grid.cell_vertices(grid.cell_of(k, c))) all = all && is_inside(sdf.values[v], grid.spacing());
    flags[c] = all ? 1 : 0;
  }
  return InclusionMask::from_flags(k, std::move(flags));
}

SparseOperator projection_matrix(const InclusionMask& mask) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(mask.cells.size());
  for (Index i = 0; i < mask.size(); ++i) t.emplace_back(i, mask.cells[i], 1.0);
  SparseOperator p(mask.size(), mask.total());
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

SparseOperator restricted_coboundary(const SparseOperator& dk, const SparseOperator& pk,
                                     const SparseOperator& pk1) {
  if (pk.cols() != dk.cols() || pk1.cols() != dk.rows())
    throw ConfigError("projection shapes do not conform to the coboundary");
  SparseOperator out = pk1 * dk * SparseOperator(pk.transpose());
  out.prune(0.0);
  return out;
}

SparseOperator restrict_operator(const SparseOperator& op, const InclusionMask& rows,
                                 const InclusionMask& cols) {
  if (op.rows() != rows.total() || op.cols() != cols.total())
    throw ConfigError("mask sizes do not conform to the operator");
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < op.outerSize(); ++j)
    for (SparseOperator::InnerIterator it(op, j); it; ++it) {
      Index r = rows.reindex[it.row()];
      Index c = cols.reindex[it.col()];
      if (r >= 0 && c >= 0 && it.value() != 0.0) t.emplace_back(r, c, it.value());
    }
  SparseOperator out(rows.size(), cols.size());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

double partial_measure(const GridComplex& grid, const ScalarField& sdf, const CellId& cell) {
  require_field(grid, sdf);
  if (!grid.contains(cell)) throw ConfigError("cell not in grid");
  const double h = grid.spacing();
  auto verts = grid.cell_vertices(cell);
  std::vector<double> f(verts.size());
  std::vector<Point> p(verts.size());
  int n_in = 0;
  int n_solid = 0;
  for (size_t i = 0; i < verts.size(); ++i) {
    f[i] = sdf.values[verts[i]];
    p[i] = grid.vertex_position(verts[i]);
    if (is_inside(f[i], h)) ++n_in;
    if (!is_outside(f[i], h)) ++n_solid;
  }
  if (n_in == 0) throw ConfigError("partial measure requested for a cell that is not included");
  const double full = std::pow(h, cell.k);
  if (n_solid == static_cast<int>(verts.size())) return full;
  double measure = 0.0;
  switch (cell.k) {
    case 0:
      return 1.0;
    case 1: {
      int i = is_outside(f[0], h) ? 1 : 0;
      measure = h * crossing_fraction(sdf, p[i], f[i], p[1 - i], f[1 - i]);
      break;
    }
    case 2: {
      auto axes = grid.class_axes(2, cell.axis_class);
      const int cycle[4] = {0, 1, 3, 2};
      std::vector<Eigen::Vector2d> poly;
      auto local = [&](const Point& q) {
        return Eigen::Vector2d(q[axes[0]] - p[0][axes[0]], q[axes[1]] - p[0][axes[1]]);
      };
      for (int s = 0; s < 4; ++s) {
        int i = cycle[s];
        int j = cycle[(s + 1) % 4];
        bool in_i = !is_outside(f[i], h);
        bool in_j = !is_outside(f[j], h);
        if (in_i) poly.push_back(local(p[i]));
        if (in_i && !in_j) poly.push_back(local(crossing_point(sdf, p[i], f[i], p[j], f[j])));
        if (!in_i && in_j) poly.push_back(local(crossing_point(sdf, p[j], f[j], p[i], f[i])));
      }
      double twice = 0.0;
      for (size_t s = 0; s < poly.size(); ++s) {
        const auto& a = poly[s];
        const auto& b = poly[(s + 1) % poly.size()];
        twice += a.x() * b.y() - a.y() * b.x();
      }
      measure = 0.5 * std::abs(twice);
      break;
    }
    case 3: {
      const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (const auto& perm : perms) {
        std::array<int, 4> ids{0, 0, 0, 7};
        ids[1] = 1 << perm[0];
        ids[2] = ids[1] | (1 << perm[1]);
        std::array<Point, 4> tp;
        std::array<double, 4> tf;
        for (int i = 0; i < 4; ++i) {
          tp[i] = p[ids[i]];
          tf[i] = f[ids[i]];
        }
        measure += inside_tet_volume(sdf, tp, tf);
      }
      break;
    }
    default:
      throw ConfigError("cell degree out of range");
  }
  return std::clamp(measure, 0.0, full);
}

DiagonalStar hodge_star(const GridComplex& grid, const ScalarField& sdf, int k, Bc bc, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be positive");
  if (k < 0 || k > grid.dim()) throw ConfigError("star degree out of range");
  if (bc == Bc::kTangential) {
    ScalarField shifted = dual_shift_field(sdf, grid);
    DiagonalStar dual = hodge_star(shifted.grid, shifted, grid.dim() - k, Bc::kNormal, eps);
    return {k, Bc::kTangential, dual.diag.cwiseInverse()};
  }
  InclusionMask mask = classify_cells(grid, sdf, k);
  const double dual_measure = std::pow(grid.spacing(), grid.dim() - k);
  const double floor = std::pow(eps, k);
  DiagonalStar star{k, Bc::kNormal, Vector(mask.size())};
  for (Index i = 0; i < mask.size(); ++i) {
    double m = partial_measure(grid, sdf, grid.cell_of(k, mask.cells[i]));
    star.diag[i] = dual_measure / std::max(m, floor);
  }
  return star;
}

}  // namespace biglap
