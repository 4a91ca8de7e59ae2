#pragma once

#include "biglap/grid_complex.hpp"

#include <optional>
#include <string>

namespace biglap {

enum class ShapeKind { kDisk, kSquare, kBall, kCube, kTorus, kShell };

/// Analytic test shape. Parameter meaning by kind:
///  disk/ball: a = radius; square/cube: a = side length;
///  torus (axis = z): a = major radius, b = minor radius;
///  shell: a = outer radius, b = inner radius.
struct Shape {
  ShapeKind kind = ShapeKind::kDisk;
  double a = 1.0;
  double b = 0.0;
  Point center = Point::Zero();

  int dim() const { return kind == ShapeKind::kDisk || kind == ShapeKind::kSquare ? 2 : 3; }
  /// Axis-aligned box containing the shape.
  BoundingBox bounds() const;
  void validate() const;
};

Shape make_disk(double radius, const Point& center = Point::Zero());
Shape make_square(double side, const Point& center = Point::Zero());
Shape make_ball(double radius, const Point& center = Point::Zero());
Shape make_cube(double side, const Point& center = Point::Zero());
Shape make_torus(double major, double minor, const Point& center = Point::Zero());
Shape make_shell(double outer, double inner, const Point& center = Point::Zero());

std::string to_string(ShapeKind kind);
ShapeKind parse_shape_kind(const std::string& text);

/// Signed distance, negative inside.
double sdf_eval(const Shape& shape, const Point& p);

/// Per-gridpoint SDF samples. When `source` is set the samples came from an
/// analytic shape, which downstream code may re-evaluate off-grid.
struct ScalarField {
  GridComplex grid;
  Vector values;
  std::optional<Shape> source;

  /// Value at an arbitrary point: analytic when possible, else multilinear
  /// interpolation (the point must lie inside the grid box).
  double eval(const Point& p) const;
};

/// Tolerance (relative to the spacing) under which a sample counts as on the
/// boundary and therefore not inside.
inline constexpr double kInsideSnap = 1e-10;

inline bool is_inside(double sdf, double spacing) { return sdf < -kInsideSnap * spacing; }

/// Strictly outside. Boundary samples are neither inside nor outside: they do
/// not select cells, but they bound the inside measure of selected cells.
inline bool is_outside(double sdf, double spacing) { return sdf > kInsideSnap * spacing; }

ScalarField sample_sdf(const Shape& shape, const GridComplex& grid);

/// Grid over the shape's bounds widened by `padding` cells on every side.
GridComplex grid_for_shape(const Shape& shape, double spacing, int padding = 2);

/// The 3x3 unit grid over [0,3]^2 used by the small worked examples.
GridComplex fig_example_grid();

/// Field resampled at the dual gridpoints (centres of the top cells). The
/// result lives on grid.dual().
ScalarField dual_shift_field(const ScalarField& sdf, const GridComplex& grid);

enum class SdfFormat { kText, kBinary };

void save_sdf(const ScalarField& field, const std::string& path, SdfFormat format = SdfFormat::kText);
ScalarField load_sdf(const std::string& path);

}  // namespace biglap
