#pragma once

#include "biglap/boundary_ops.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace biglap {

using Simplex = std::vector<Index>;  // sorted vertex ids; orientation is the sorted order

/// Abstract simplicial complex of dimension <= 3, closed under faces.
class SimplicialComplex {
 public:
  explicit SimplicialComplex(Index vertex_count = 0);

  /// Adds a simplex and all its faces. Vertex ids need not be sorted but must
  /// be distinct and below vertex_count().
  void add(Simplex simplex);

  Index vertex_count() const { return count(0); }
  int max_dim() const;
  Index count(int k) const;
  const std::vector<Simplex>& simplices(int k) const { return by_dim_.at(k); }
  /// Index of a sorted simplex, or -1.
  Index find(const Simplex& s) const;

  std::optional<std::vector<Point>> positions;

 private:
  std::vector<std::vector<Simplex>> by_dim_;
  std::vector<std::map<Simplex, Index>> lookup_;
};

struct Graph {
  Index vertex_count = 0;
  std::vector<std::pair<Index, Index>> edges;
};

/// k-simplices are the (k+1)-cliques of the graph, k <= max_dim.
SimplicialComplex clique_complex(const Graph& graph, int max_dim);

/// B_k: rows (k-1)-simplices, cols k-simplices, coefficient (-1)^i for the
/// face omitting the i-th vertex.
SparseOperator boundary_matrix(const SimplicialComplex& complex, int k);

/// B_{k+1} B_{k+1}^T + B_k^T B_k, checked against the adjacency entry rule.
SparseOperator combinatorial_laplacian(const SimplicialComplex& complex, int k);

/// The same Laplacian assembled from degrees and adjacencies alone: diagonal
/// deg_U + deg_L (cofaces plus the k+1 faces when k > 0); off-diagonal
/// -1 between adjacent vertices for k = 0, and for k > 0 the product of the
/// two boundary coefficients on the shared face when the simplices share a
/// face but no coface, else 0.
SparseOperator combinatorial_laplacian_by_entries(const SimplicialComplex& complex, int k);

/// Edge weights of a planar triangulation: sum of the cotangents of the
/// angles opposite each edge (one term on boundary edges).
DiagonalStar cotangent_star_1(const SimplicialComplex& triangulation);

/// Vertex star matching cotangent_star_1's weights: two thirds of the
/// incident triangle area.
DiagonalStar cotangent_vertex_star(const SimplicialComplex& triangulation);

/// Boundary matrices of a chain complex, boundary[k] = B_{k+1} (k-chains <-
/// (k+1)-chains).
struct ChainComplex {
  std::vector<Index> sizes;
  std::vector<SparseOperator> boundary;

  int top() const { return static_cast<int>(sizes.size()) - 1; }
};

ChainComplex chain_complex(const SimplicialComplex& complex);

/// Polygonal 2D cell complex (vertices, edges, faces given as vertex cycles).
struct PolygonMesh {
  std::vector<Point> vertices;
  std::vector<std::vector<Index>> faces;
};

ChainComplex cell_chain_complex(const PolygonMesh& mesh);
/// Graph made of the mesh edges.
Graph mesh_graph(const PolygonMesh& mesh);

enum class BettiMethod { kExactRank, kEigenKernel, kBoth };

/// beta_k for k = 0..top. kBoth computes both and throws NumericalError when
/// they disagree.
std::vector<int> betti_numbers(const ChainComplex& chain, BettiMethod method = BettiMethod::kBoth);
std::vector<int> betti_numbers(const SimplicialComplex& complex, int max_k, BettiMethod method = BettiMethod::kBoth);

/// Rank over the rationals.
Index exact_rank(const SparseOperator& matrix);

/// Quad mesh of a torus surface with nu * nv faces.
PolygonMesh quad_torus_mesh(Index nu, Index nv, double major, double minor);

/// Structured triangulation of the rectangle spanned by the coordinate lists
/// (each cell split along an alternating diagonal); interior vertices are
/// jittered by up to `jitter` times the smaller adjacent gap per axis, so
/// boundary vertices stay on the boundary.
SimplicialComplex grid_triangulation(const std::vector<double>& xs, const std::vector<double>& ys, double jitter,
                                     std::uint64_t seed);

/// Structured triangulation of the unit square with n x n cells; vertex
/// coordinates graded by t -> t^grading and jittered by up to `jitter`
/// times the local cell size (boundary vertices stay on the boundary).
SimplicialComplex square_triangulation(Index n, double grading, double jitter, std::uint64_t seed);

PolygonMesh read_off(const std::string& path);
void write_off(const PolygonMesh& mesh, const std::string& path);
Graph read_edge_list(const std::string& path);

}  // namespace biglap
