#include "biglap/grid_complex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace biglap {

namespace {

constexpr int kClassAxes[4][3][3] = {
    {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}},
    {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}},
    {{0, 1, 0}, {1, 2, 0}, {2, 0, 0}},
    {{0, 1, 2}, {0, 0, 0}, {0, 0, 0}},
};

// Eigen sparse matrices index with int.
constexpr Index kMaxCells = std::numeric_limits<int>::max() / 8;

bool spans(std::span<const int> axes, int axis) {
  return std::find(axes.begin(), axes.end(), axis) != axes.end();
}

// Class and orientation sign of the cell spanned by `axes` (any order).
std::pair<int, int> class_and_parity(const GridComplex& grid, int k, const std::vector<int>& axes) {
  for (int c = 0; c < grid.class_count(k); ++c) {
    auto canon = grid.class_axes(k, c);
    if (!std::is_permutation(canon.begin(), canon.end(), axes.begin(), axes.end())) continue;
    std::vector<int> pos(axes.size());
    for (size_t i = 0; i < axes.size(); ++i)
      pos[i] = static_cast<int>(std::find(canon.begin(), canon.end(), axes[i]) - canon.begin());
    int inversions = 0;
    for (size_t i = 0; i < pos.size(); ++i)
      for (size_t j = i + 1; j < pos.size(); ++j)
        if (pos[i] > pos[j]) ++inversions;
    return {c, inversions % 2 == 0 ? 1 : -1};
  }
  throw Error("internal: no cell class spans the requested axes");
}

}  // namespace

GridComplex::GridComplex(int dim, const Point& origin, double spacing,
                         std::array<Index, 3> vertex_counts)
    : dim_(dim), origin_(origin), spacing_(spacing), counts_(vertex_counts) {
  if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("grid spacing must be positive");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) counts_[a] = 1;
    if (counts_[a] < 1) throw ConfigError("vertex counts must be positive");
  }
  if (dim == 2) origin_[2] = 0.0;
  for (int k = 0; k <= dim_; ++k) {
    Index total = 0;
    for (int c = 0; c < class_count(k); ++c) {
      class_offsets_[k][c] = total;
      auto ext = class_extent(k, c);
      long double size = static_cast<long double>(ext[0]) * ext[1] * ext[2];
      if (size + total > kMaxCells) throw ConfigError("grid too large: cell count overflows index type");
      total += ext[0] * ext[1] * ext[2];
    }
    class_offsets_[k][class_count(k)] = total;
  }
}

int GridComplex::class_count(int k) const {
  if (k < 0 || k > dim_) return 0;
  if (k == 0 || k == dim_) return 1;
  return dim_;
}

std::span<const int> GridComplex::class_axes(int k, int axis_class) const {
  if (k == 2 && dim_ == 2) return {kClassAxes[2][0], 2};
  return {kClassAxes[k][axis_class], static_cast<size_t>(k)};
}

std::array<Index, 3> GridComplex::class_extent(int k, int axis_class) const {
  auto axes = class_axes(k, axis_class);
  std::array<Index, 3> ext{1, 1, 1};
  for (int a = 0; a < dim_; ++a) ext[a] = counts_[a] - (spans(axes, a) ? 1 : 0);
  for (auto& e : ext) e = std::max<Index>(e, 0);
  return ext;
}

Index GridComplex::class_size(int k, int axis_class) const {
  auto ext = class_extent(k, axis_class);
  return ext[0] * ext[1] * ext[2];
}

Index GridComplex::cell_count(int k) const {
  if (k < 0 || k > dim_) return 0;
  return class_offsets_[k][class_count(k)];
}

Index GridComplex::index_of(const CellId& cell) const {
  auto ext = class_extent(cell.k, cell.axis_class);
  return class_offsets_[cell.k][cell.axis_class] + cell.coords[0] +
         ext[0] * (cell.coords[1] + ext[1] * cell.coords[2]);
}

CellId GridComplex::cell_of(int k, Index index) const {
  if (k < 0 || k > dim_ || index < 0 || index >= cell_count(k))
    throw ConfigError("cell index out of range");
  int c = 0;
  while (index >= class_offsets_[k][c + 1]) ++c;
  Index local = index - class_offsets_[k][c];
  auto ext = class_extent(k, c);
  CellId cell{k, c, {0, 0, 0}};
  cell.coords[0] = local % ext[0];
  local /= ext[0];
  cell.coords[1] = local % ext[1];
  cell.coords[2] = local / ext[1];
  return cell;
}

bool GridComplex::contains(const CellId& cell) const {
  if (cell.k < 0 || cell.k > dim_ || cell.axis_class < 0 || cell.axis_class >= class_count(cell.k))
    return false;
  auto ext = class_extent(cell.k, cell.axis_class);
  for (int a = 0; a < 3; ++a)
    if (cell.coords[a] < 0 || cell.coords[a] >= ext[a]) return false;
  return true;
}

Index GridComplex::vertex_index(const std::array<Index, 3>& coords) const {
  return coords[0] + counts_[0] * (coords[1] + counts_[1] * coords[2]);
}

Point GridComplex::position(const std::array<Index, 3>& coords) const {
  Point p = origin_;
  for (int a = 0; a < dim_; ++a) p[a] += spacing_ * static_cast<double>(coords[a]);
  return p;
}

Point GridComplex::vertex_position(Index vertex) const {
  return position(cell_of(0, vertex).coords);
}

std::vector<Index> GridComplex::cell_vertices(const CellId& cell) const {
  auto axes = class_axes(cell.k, cell.axis_class);
  std::vector<Index> out(size_t{1} << cell.k);
  for (size_t bits = 0; bits < out.size(); ++bits) {
    auto c = cell.coords;
    for (int i = 0; i < cell.k; ++i)
      if (bits & (size_t{1} << i)) ++c[axes[i]];
    out[bits] = vertex_index(c);
  }
  return out;
}

bool GridComplex::on_outer_layer(Index vertex) const {
  auto c = cell_of(0, vertex).coords;
  for (int a = 0; a < dim_; ++a)
    if (c[a] == 0 || c[a] == counts_[a] - 1) return true;
  return false;
}

GridComplex GridComplex::dual() const {
  std::array<Index, 3> counts = counts_;
  Point origin = origin_;
  for (int a = 0; a < dim_; ++a) {
    if (counts[a] < 2) throw ConfigError("grid has no top cells to form a dual grid");
    counts[a] -= 1;
    origin[a] += 0.5 * spacing_;
  }
  return GridComplex(dim_, origin, spacing_, counts);
}

GridComplex build_grid(const BoundingBox& box, double spacing, int dim) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("grid spacing must be positive");
  if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3");
  std::array<Index, 3> counts{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    double extent = box.max[a] - box.min[a];
    if (!(extent > 0.0) || !std::isfinite(extent)) throw ConfigError("bounding box is degenerate");
    double ratio = extent / spacing;
    if (ratio > static_cast<double>(kMaxCells)) throw ConfigError("grid too large: cell count overflows index type");
    double nearest = std::round(ratio);
    double cells = std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio) ? nearest : std::ceil(ratio);
    counts[a] = static_cast<Index>(cells) + 1;
  }
  return GridComplex(dim, box.min, spacing, counts);
}

SparseOperator coboundary(const GridComplex& grid, int k) {
  if (k < 0 || k >= grid.dim()) throw ConfigError("coboundary degree out of range");
  const Index rows = grid.cell_count(k + 1);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(rows) * 2 * (k + 1));
  for (int c = 0; c < grid.class_count(k + 1); ++c) {
    auto axes = grid.class_axes(k + 1, c);
    // Faces of this class: drop axis i, giving face class/parity.
    struct FaceRule {
      int axis;
      int face_class;
      int sign;
    };
    std::vector<FaceRule> rules;
    for (int i = 0; i <= k; ++i) {
      std::vector<int> rest;
      for (int j = 0; j <= k; ++j)
        if (j != i) rest.push_back(axes[j]);
      auto [fc, parity] = class_and_parity(grid, k, rest);
      rules.push_back({axes[i], fc, (i % 2 == 0 ? 1 : -1) * parity});
    }
    auto ext = grid.class_extent(k + 1, c);
    for (Index z = 0; z < ext[2]; ++z)
      for (Index y = 0; y < ext[1]; ++y)
        for (Index x = 0; x < ext[0]; ++x) {
          CellId cell{k + 1, c, {x, y, z}};
          const Index row = grid.index_of(cell);
          for (const auto& rule : rules) {
            CellId face{k, rule.face_class, cell.coords};
            triplets.emplace_back(row, grid.index_of(face), -rule.sign);
            ++face.coords[rule.axis];
            triplets.emplace_back(row, grid.index_of(face), rule.sign);
          }
        }
  }
  SparseOperator d(rows, grid.cell_count(k));
  d.setFromTriplets(triplets.begin(), triplets.end());
  return d;
}

}  // namespace biglap
