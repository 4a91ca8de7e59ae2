#include "biglap/shapes.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace biglap {

namespace {

double box_sdf(const Point& d, double half, int dim) {
  double outside = 0.0;
  double inside = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim; ++a) {
    double q = std::abs(d[a]) - half;
    outside += std::max(q, 0.0) * std::max(q, 0.0);
    inside = std::max(inside, q);
  }
  return std::sqrt(outside) + std::min(inside, 0.0);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw IoError("malformed number '" + tok + "' in SDF file");
  return v;
}

}  // namespace

BoundingBox Shape::bounds() const {
  double ext = 0.0;
  double ext_z = 0.0;
  switch (kind) {
    case ShapeKind::kDisk:
    case ShapeKind::kBall:
      ext = ext_z = a;
      break;
    case ShapeKind::kSquare:
    case ShapeKind::kCube:
      ext = ext_z = 0.5 * a;
      break;
    case ShapeKind::kTorus:
      ext = a + b;
      ext_z = b;
      break;
    case ShapeKind::kShell:
      ext = ext_z = a;
      break;
  }
  BoundingBox box;
  box.min = center - Point(ext, ext, ext_z);
  box.max = center + Point(ext, ext, ext_z);
  if (dim() == 2) box.min[2] = box.max[2] = 0.0;
  return box;
}

void Shape::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("shape size must be positive");
  if (kind == ShapeKind::kTorus && !(b > 0.0 && b < a))
    throw ConfigError("torus needs 0 < minor radius < major radius");
  if (kind == ShapeKind::kShell && !(b > 0.0 && b < a))
    throw ConfigError("shell needs 0 < inner radius < outer radius");
  if (!center.allFinite()) throw ConfigError("shape center must be finite");
}

Shape make_disk(double radius, const Point& center) { return {ShapeKind::kDisk, radius, 0.0, center}; }
Shape make_square(double side, const Point& center) { return {ShapeKind::kSquare, side, 0.0, center}; }
Shape make_ball(double radius, const Point& center) { return {ShapeKind::kBall, radius, 0.0, center}; }
Shape make_cube(double side, const Point& center) { return {ShapeKind::kCube, side, 0.0, center}; }
Shape make_torus(double major, double minor, const Point& center) {
  return {ShapeKind::kTorus, major, minor, center};
}
Shape make_shell(double outer, double inner, const Point& center) {
  return {ShapeKind::kShell, outer, inner, center};
}

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kDisk:
      return "disk";
    case ShapeKind::kSquare:
      return "square";
    case ShapeKind::kBall:
      return "ball";
    case ShapeKind::kCube:
      return "cube";
    case ShapeKind::kTorus:
      return "torus";
    case ShapeKind::kShell:
      return "shell";
  }
  return "unknown";
}

ShapeKind parse_shape_kind(const std::string& text) {
  for (auto kind : {ShapeKind::kDisk, ShapeKind::kSquare, ShapeKind::kBall, ShapeKind::kCube,
                    ShapeKind::kTorus, ShapeKind::kShell})
    if (to_string(kind) == text) return kind;
  throw ConfigError("unknown shape '" + text + "'");
}

double sdf_eval(const Shape& shape, const Point& p) {
  Point d = p - shape.center;
  const int dim = shape.dim();
  if (dim == 2) d[2] = 0.0;
  switch (shape.kind) {
    case ShapeKind::kDisk:
    case ShapeKind::kBall:
      return d.norm() - shape.a;
    case ShapeKind::kSquare:
    case ShapeKind::kCube:
      return box_sdf(d, 0.5 * shape.a, dim);
    case ShapeKind::kTorus: {
      double q = std::hypot(d[0], d[1]) - shape.a;
      return std::hypot(q, d[2]) - shape.b;
    }
    case ShapeKind::kShell:
      return std::abs(d.norm() - 0.5 * (shape.a + shape.b)) - 0.5 * (shape.a - shape.b);
  }
  return 0.0;
}

double ScalarField::eval(const Point& p) const {
  if (source) return sdf_eval(*source, p);
  const int dim = grid.dim();
  auto counts = grid.vertex_counts();
  std::array<Index, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    double u = (p[a] - grid.origin()[a]) / grid.spacing();
    if (u < -1e-9 || u > static_cast<double>(counts[a] - 1) + 1e-9)
      throw ConfigError("point outside the sampled SDF grid");
    Index i = std::clamp<Index>(static_cast<Index>(std::floor(u)), 0, std::max<Index>(counts[a] - 2, 0));
    base[a] = i;
    frac[a] = std::clamp(u - static_cast<double>(i), 0.0, 1.0);
  }
  double sum = 0.0;
  for (int bits = 0; bits < (1 << dim); ++bits) {
    double w = 1.0;
    auto c = base;
    for (int a = 0; a < dim; ++a) {
      bool up = bits & (1 << a);
      w *= up ? frac[a] : 1.0 - frac[a];
      if (up) c[a] = std::min(c[a] + 1, counts[a] - 1);
    }
    if (w != 0.0) sum += w * values[grid.vertex_index(c)];
  }
  return sum;
}

ScalarField sample_sdf(const Shape& shape, const GridComplex& grid) {
  shape.validate();
  if (shape.dim() != grid.dim()) throw ConfigError("shape and grid dimensions differ");
  ScalarField field{grid, Vector(grid.cell_count(0)), shape};
  for (Index v = 0; v < grid.cell_count(0); ++v) field.values[v] = sdf_eval(shape, grid.vertex_position(v));
  return field;
}

GridComplex grid_for_shape(const Shape& shape, double spacing, int padding) {
  shape.validate();
  if (padding < 1) throw ConfigError("padding must be at least one cell");
  if (!(spacing > 0.0)) throw ConfigError("grid spacing must be positive");
  BoundingBox box = shape.bounds();
  for (int a = 0; a < shape.dim(); ++a) {
    box.min[a] -= padding * spacing;
    box.max[a] += padding * spacing;
  }
  return build_grid(box, spacing, shape.dim());
}

GridComplex fig_example_grid() {
  BoundingBox box{Point(0, 0, 0), Point(3, 3, 0)};
  return build_grid(box, 1.0, 2);
}

ScalarField dual_shift_field(const ScalarField& sdf, const GridComplex& grid) {
  if (sdf.values.size() != grid.cell_count(0)) throw ConfigError("field does not match grid");
  GridComplex dual = grid.dual();
  ScalarField out{dual, Vector(dual.cell_count(0)), sdf.source};
  if (sdf.source) {
    for (Index v = 0; v < dual.cell_count(0); ++v) out.values[v] = sdf_eval(*sdf.source, dual.vertex_position(v));
    return out;
  }
  for (Index v = 0; v < grid.cell_count(0); ++v)
    if (grid.on_outer_layer(v) && is_inside(sdf.values[v], grid.spacing()))
      throw ConfigError("sampled SDF lacks an outside padding layer; cannot shift to the dual grid");
  // Dual gridpoint i is the centre of primal top cell i.
  const int top = grid.dim();
  const double weight = 1.0 / static_cast<double>(1 << top);
  for (Index c = 0; c < grid.cell_count(top); ++c) {
    double sum = 0.0;
    for (Index v : grid.cell_vertices(grid.cell_of(top, c))) sum += sdf.values[v];
    out.values[c] = sum * weight;
  }
  return out;
}

void save_sdf(const ScalarField& field, const std::string& path, SdfFormat format) {
  const auto& g = field.grid;
  if (field.values.size() != g.cell_count(0)) throw ConfigError("field does not match grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  std::string header = format == SdfFormat::kText ? "SDF" : "SDFB";
  header += " " + std::to_string(g.dim());
  for (int a = 0; a < g.dim(); ++a) header += " " + std::to_string(g.vertex_counts()[a]);
  for (int a = 0; a < g.dim(); ++a) header += " " + format_double(g.origin()[a]);
  header += " " + format_double(g.spacing()) + "\n";
  out << header;
  if (format == SdfFormat::kText) {
    for (Index i = 0; i < field.values.size(); ++i) out << format_double(field.values[i]) << '\n';
  } else {
    for (Index i = 0; i < field.values.size(); ++i) {
      auto bits = std::bit_cast<std::uint64_t>(field.values[i]);
      char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
      out.write(bytes, 8);
    }
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

ScalarField load_sdf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw IoError("empty SDF file");
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != "SDF" && magic != "SDFB") throw IoError("malformed SDF header: bad magic");
  std::vector<std::string> tok;
  for (std::string t; hs >> t;) tok.push_back(t);
  if (tok.empty()) throw IoError("malformed SDF header");
  int dim = static_cast<int>(parse_double(tok[0]));
  if (dim != 2 && dim != 3) throw IoError("malformed SDF header: dimension must be 2 or 3");
  if (tok.size() != static_cast<size_t>(1 + 2 * dim + 1)) throw IoError("malformed SDF header: wrong field count");
  std::array<Index, 3> counts{1, 1, 1};
  Point origin = Point::Zero();
  for (int a = 0; a < dim; ++a) {
    double c = parse_double(tok[1 + a]);
    if (c < 1 || c != std::floor(c)) throw IoError("malformed SDF header: bad count");
    counts[a] = static_cast<Index>(c);
    origin[a] = parse_double(tok[1 + dim + a]);
  }
  double spacing = parse_double(tok[1 + 2 * dim]);
  GridComplex grid;
  try {
    grid = GridComplex(dim, origin, spacing, counts);
  } catch (const ConfigError& e) {
    throw IoError(std::string("malformed SDF header: ") + e.what());
  }
  ScalarField field{grid, Vector(grid.cell_count(0)), std::nullopt};
  const Index n = grid.cell_count(0);
  if (magic == "SDF") {
    Index i = 0;
    for (std::string t; in >> t; ++i) {
      if (i >= n) throw IoError("SDF payload longer than header dimensions");
      field.values[i] = parse_double(t);
    }
    if (i != n) throw IoError("SDF payload shorter than header dimensions");
  } else {
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != static_cast<size_t>(n) * 8) throw IoError("SDF payload length disagrees with header dimensions");
    for (Index i = 0; i < n; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 * i + b])) << (8 * b);
      field.values[i] = std::bit_cast<double>(bits);
    }
  }
  if (!field.values.allFinite()) throw IoError("SDF payload contains non-finite values");
  return field;
}

}  // namespace biglap
