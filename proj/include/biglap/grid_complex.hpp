#pragma once

#include "biglap/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace biglap {

struct BoundingBox {
  Point min = Point::Zero();
  Point max = Point::Zero();
};

/// A k-cell of the Cartesian complex: its dimension, its axis class (which
/// axes it spans) and the lattice coordinates of its lowest corner.
struct CellId {
  int k = 0;
  int axis_class = 0;
  std::array<Index, 3> coords{0, 0, 0};

  friend bool operator==(const CellId&, const CellId&) = default;
};

/// Cartesian cell complex over a box.
///
/// Layout conventions (fixed so operators are byte-reproducible):
///  - Gridpoint (i, j, l) sits at origin + spacing * (i, j, l); x varies fastest.
///  - k-cells are numbered axis-class-major, then row-major over the lowest
///    corner coordinates (x fastest) within each class.
///  - Edge classes are x, y, z; 3D face classes are xy, yz, zx; the single
///    top cell class spans xyz. A cell is oriented by the listed axis order,
///    so edges point toward +axis and faces follow the right-hand rule.
///
/// The complex is immutable after construction.
class GridComplex {
 public:
  GridComplex() = default;
  GridComplex(int dim, const Point& origin, double spacing, std::array<Index, 3> vertex_counts);

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  const Point& origin() const { return origin_; }
  std::array<Index, 3> vertex_counts() const { return counts_; }

  int class_count(int k) const;
  /// Axes spanned by a class, in orientation order.
  std::span<const int> class_axes(int k, int axis_class) const;
  /// Number of lowest-corner positions per axis for a class.
  std::array<Index, 3> class_extent(int k, int axis_class) const;
  Index class_size(int k, int axis_class) const;
  Index cell_count(int k) const;

  Index index_of(const CellId& cell) const;
  CellId cell_of(int k, Index index) const;
  bool contains(const CellId& cell) const;

  Index vertex_index(const std::array<Index, 3>& coords) const;
  Point position(const std::array<Index, 3>& coords) const;
  Point vertex_position(Index vertex) const;

  /// Gridpoints incident to a cell (2^k of them), ordered by the binary
  /// offsets along the class axes (first axis is the low bit).
  std::vector<Index> cell_vertices(const CellId& cell) const;

  /// True if the gridpoint lies on the outermost layer of the grid.
  bool on_outer_layer(Index vertex) const;

  /// Staggered grid whose gridpoints are the centres of this grid's top
  /// cells: origin shifted by spacing/2 along every axis, one fewer point
  /// per axis.
  GridComplex dual() const;

 private:
  int dim_ = 0;
  Point origin_ = Point::Zero();
  double spacing_ = 0.0;
  std::array<Index, 3> counts_{1, 1, 1};
  std::array<std::array<Index, 4>, 4> class_offsets_{};
};

/// Grid covering `box` with gridpoints registered at box.min; per-axis cell
/// counts are the ceiling of extent / spacing.
GridComplex build_grid(const BoundingBox& box, double spacing, int dim);

/// Signed incidence matrix from k-cells to (k+1)-cells (entries in {-1, 0, 1},
/// 2(k+1) nonzeros per row).
SparseOperator coboundary(const GridComplex& grid, int k);

}  // namespace biglap
