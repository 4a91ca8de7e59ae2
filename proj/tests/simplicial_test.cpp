#include "biglap/simplicial.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace biglap;

namespace {

Graph cycle_graph(Index n) {
  Graph g{n, {}};
  for (Index i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  return g;
}

Graph complete_graph(Index n) {
  Graph g{n, {}};
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  return g;
}

Vector dense_eigenvalues(const SparseOperator& a) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(a), Eigen::EigenvaluesOnly).eigenvalues();
}

void expect_spectrum(const Vector& got, std::initializer_list<double> want) {
  ASSERT_EQ(got.size(), static_cast<Index>(want.size()));
  Index i = 0;
  for (double w : want) EXPECT_NEAR(got[i++], w, 1e-12);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("biglap_simplicial_" + name)).string();
}

}  // namespace

TEST(CliqueComplex, CycleAndCompleteGraphCounts) {
  SimplicialComplex c4 = clique_complex(cycle_graph(4), 3);
  EXPECT_EQ(c4.count(0), 4);
  EXPECT_EQ(c4.count(1), 4);
  EXPECT_EQ(c4.count(2), 0);
  SimplicialComplex k4 = clique_complex(complete_graph(4), 3);
  EXPECT_EQ(k4.count(1), 6);
  EXPECT_EQ(k4.count(2), 4);
  EXPECT_EQ(k4.count(3), 1);
  SimplicialComplex k4_2 = clique_complex(complete_graph(4), 2);
  EXPECT_EQ(k4_2.count(2), 4);
  EXPECT_EQ(k4_2.max_dim(), 2);
}

TEST(SimplicialComplex, AddClosesUnderFaces) {
  SimplicialComplex c(4);
  c.add({3, 1, 0});
  EXPECT_EQ(c.count(1), 3);
  EXPECT_EQ(c.count(2), 1);
  EXPECT_GE(c.find({0, 3}), 0);
  EXPECT_EQ(c.find({2, 3}), -1);
  EXPECT_THROW(c.add({0, 0}), ConfigError);
  EXPECT_THROW(c.add({0, 7}), ConfigError);
}

TEST(BoundaryMatrix, SignsFollowOmittedVertex) {
  SimplicialComplex c(3);
  c.add({0, 1, 2});
  Eigen::MatrixXd b1 = Eigen::MatrixXd(boundary_matrix(c, 1));
  Index e01 = c.find({0, 1});
  EXPECT_EQ(b1(0, e01), -1.0);
  EXPECT_EQ(b1(1, e01), 1.0);
  Eigen::MatrixXd b2 = Eigen::MatrixXd(boundary_matrix(c, 2));
  ASSERT_EQ(b2.cols(), 1);
  EXPECT_EQ(b2(c.find({1, 2}), 0), 1.0);
  EXPECT_EQ(b2(c.find({0, 2}), 0), -1.0);
  EXPECT_EQ(b2(c.find({0, 1}), 0), 1.0);
}

TEST(BoundaryMatrix, ComposesToZero) {
  SimplicialComplex k5 = clique_complex(complete_graph(5), 3);
  for (int k = 1; k < 3; ++k) {
    Eigen::MatrixXd bb = Eigen::MatrixXd(boundary_matrix(k5, k) * boundary_matrix(k5, k + 1));
    EXPECT_EQ(bb.cwiseAbs().maxCoeff(), 0.0) << k;
  }
}

TEST(CombinatorialLaplacian, CycleGraphSpectrum) {
  SimplicialComplex c4 = clique_complex(cycle_graph(4), 2);
  expect_spectrum(dense_eigenvalues(combinatorial_laplacian(c4, 0)), {0, 2, 2, 4});
  expect_spectrum(dense_eigenvalues(combinatorial_laplacian(c4, 1)), {0, 2, 2, 4});
}

TEST(CombinatorialLaplacian, SplitSquare) {
  SimplicialComplex sq = square_triangulation(1, 1.0, 0.0, 1);
  Eigen::MatrixXd l0 = Eigen::MatrixXd(combinatorial_laplacian(sq, 0));
  // Vertices (0,0),(1,0),(0,1),(1,1) with the diagonal from the first to the last.
  EXPECT_EQ(l0(0, 0), 3.0);
  EXPECT_EQ(l0(1, 1), 2.0);
  EXPECT_EQ(l0(2, 2), 2.0);
  EXPECT_EQ(l0(3, 3), 3.0);
  expect_spectrum(dense_eigenvalues(combinatorial_laplacian(sq, 0)), {0, 2, 4, 4});
}

TEST(CombinatorialLaplacian, ProductMatchesEntryRuleOnRandomComplexes) {
  std::mt19937_64 rng(21);
  std::bernoulli_distribution keep(0.45);
  for (int trial = 0; trial < 50; ++trial) {
    Graph g{9, {}};
    for (Index i = 0; i < 9; ++i)
      for (Index j = i + 1; j < 9; ++j)
        if (keep(rng)) g.edges.emplace_back(i, j);
    SimplicialComplex c = clique_complex(g, 3);
    for (int k = 0; k <= c.max_dim(); ++k) {
      Eigen::MatrixXd a = Eigen::MatrixXd(combinatorial_laplacian(c, k));
      Eigen::MatrixXd b = Eigen::MatrixXd(combinatorial_laplacian_by_entries(c, k));
      EXPECT_EQ(a, b) << "trial " << trial << " k " << k;
    }
  }
}

TEST(CombinatorialLaplacian, SpectrumIndependentOfVertexLabels) {
  Graph g{6, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}, {5, 3}, {1, 4}}};
  std::vector<Index> relabel = {4, 0, 5, 2, 1, 3};
  Graph h{6, {}};
  for (auto [u, v] : g.edges) h.edges.emplace_back(relabel[u], relabel[v]);
  SimplicialComplex a = clique_complex(g, 2), b = clique_complex(h, 2);
  for (int k = 0; k <= 2; ++k) {
    Vector ea = dense_eigenvalues(combinatorial_laplacian(a, k));
    Vector eb = dense_eigenvalues(combinatorial_laplacian(b, k));
    ASSERT_EQ(ea.size(), eb.size());
    EXPECT_LT((ea - eb).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(CotangentStar, SplitSquareDiagonalCarriesNoWeight) {
  SimplicialComplex sq = square_triangulation(1, 1.0, 0.0, 1);
  Vector w = cotangent_star_1(sq).diag;
  EXPECT_NEAR(w[sq.find({0, 3})], 0.0, 1e-15);
  EXPECT_NEAR(w[sq.find({0, 1})], 1.0, 1e-15);
  SparseOperator d0 = SparseOperator(boundary_matrix(sq, 1).transpose());
  SparseOperator stiffness = d0.transpose() * w.asDiagonal() * d0;
  expect_spectrum(dense_eigenvalues(stiffness), {0, 2, 2, 4});
  Vector v = cotangent_vertex_star(sq).diag;
  EXPECT_NEAR(v.sum(), 2.0 / 3.0 * 3.0 * 1.0, 1e-12);  // each triangle area counted at its 3 vertices
}

TEST(CotangentStar, EquilateralTriangle) {
  SimplicialComplex t(3);
  t.add({0, 1, 2});
  t.positions = std::vector<Point>{Point(0, 0, 0), Point(1, 0, 0), Point(0.5, std::sqrt(0.75), 0)};
  Vector w = cotangent_star_1(t).diag;
  for (Index e = 0; e < 3; ++e) EXPECT_NEAR(w[e], 1.0 / std::sqrt(3.0), 1e-14);
  t.positions.reset();
  EXPECT_THROW(cotangent_star_1(t), ConfigError);
}

TEST(Betti, SmallComplexes) {
  SimplicialComplex two_edges(3);
  two_edges.add({0, 1});
  two_edges.add({1, 2});
  EXPECT_EQ(betti_numbers(two_edges, 1), (std::vector<int>{1, 0}));
  SimplicialComplex hollow(3);
  hollow.add({0, 1});
  hollow.add({1, 2});
  hollow.add({0, 2});
  EXPECT_EQ(betti_numbers(hollow, 1), (std::vector<int>{1, 1}));
  SimplicialComplex filled(3);
  filled.add({0, 1, 2});
  EXPECT_EQ(betti_numbers(filled, 2), (std::vector<int>{1, 0, 0}));
  SimplicialComplex apart(4);
  apart.add({0, 1});
  apart.add({2, 3});
  EXPECT_EQ(betti_numbers(apart, 1), (std::vector<int>{2, 0}));
  // Boundary of a tetrahedron is a sphere.
  SimplicialComplex sphere(4);
  for (Simplex f : {Simplex{0, 1, 2}, Simplex{0, 1, 3}, Simplex{0, 2, 3}, Simplex{1, 2, 3}}) sphere.add(f);
  EXPECT_EQ(betti_numbers(sphere, 2), (std::vector<int>{1, 0, 1}));
}

TEST(Betti, QuadTorusCellComplex) {
  PolygonMesh m = quad_torus_mesh(12, 8, 1.0, 0.4);
  EXPECT_EQ(m.vertices.size(), 96u);
  EXPECT_EQ(m.faces.size(), 96u);
  EXPECT_EQ(betti_numbers(cell_chain_complex(m)), (std::vector<int>{1, 2, 1}));
}

TEST(Betti, EulerCharacteristicOfRandomCliqueComplexes) {
  std::mt19937_64 rng(33);
  std::bernoulli_distribution keep(0.5);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g{8, {}};
    for (Index i = 0; i < 8; ++i)
      for (Index j = i + 1; j < 8; ++j)
        if (keep(rng)) g.edges.emplace_back(i, j);
    SimplicialComplex c = clique_complex(g, 3);
    std::vector<int> b = betti_numbers(c, 3);
    long chi_cells = 0, chi_betti = 0;
    for (int k = 0; k <= 3; ++k) {
      long sign = k % 2 ? -1 : 1;
      chi_cells += sign * (k <= c.max_dim() ? c.count(k) : 0);
      chi_betti += sign * b[k];
    }
    EXPECT_EQ(chi_cells, chi_betti);
  }
}

TEST(ExactRank, RationalElimination) {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  EXPECT_EQ(exact_rank(a.sparseView()), 2);
  Eigen::MatrixXd b(2, 2);
  b << 1e-9, 0, 0, 0;
  EXPECT_EQ(exact_rank(b.sparseView()), 1);
}

TEST(SquareTriangulation, BoundaryStaysFixedUnderJitter) {
  const Index n = 6;
  SimplicialComplex t = square_triangulation(n, 2.0, 0.3, 4);
  ASSERT_TRUE(t.positions.has_value());
  EXPECT_EQ(t.count(2), 2 * n * n);
  for (Index j = 0; j <= n; ++j)
    for (Index i = 0; i <= n; ++i) {
      const Point& p = (*t.positions)[j * (n + 1) + i];
      if (i == 0) { EXPECT_EQ(p[0], 0.0); }
      if (i == n) { EXPECT_EQ(p[0], 1.0); }
      if (j == 0) { EXPECT_EQ(p[1], 0.0); }
      if (j == n) { EXPECT_EQ(p[1], 1.0); }
    }
  Vector area = cotangent_vertex_star(t).diag;
  EXPECT_NEAR(area.sum(), 2.0, 1e-12);
  EXPECT_THROW(square_triangulation(0, 1.0, 0.0, 1), ConfigError);
  EXPECT_THROW(square_triangulation(4, 1.0, 0.5, 1), ConfigError);
}

TEST(GridTriangulation, NonuniformColumnsCoverTheSquare) {
  std::vector<double> xs = {0.0, 0.125, 0.25, 0.375, 0.5, 1.0};
  std::vector<double> ys = {0.0, 0.5, 1.0};
  SimplicialComplex t = grid_triangulation(xs, ys, 0.2, 3);
  EXPECT_EQ(t.count(0), 18);
  EXPECT_EQ(t.count(2), 20);
  EXPECT_NEAR(cotangent_vertex_star(t).diag.sum(), 2.0, 1e-12);
  EXPECT_EQ(betti_numbers(t, 2), (std::vector<int>{1, 0, 0}));
  // Constants are in the kernel of the cotangent stiffness.
  SparseOperator d0 = SparseOperator(boundary_matrix(t, 1).transpose());
  Vector w = cotangent_star_1(t).diag;
  Vector ones = Vector::Ones(t.count(0));
  EXPECT_LT((d0.transpose() * w.asDiagonal() * d0 * ones).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(grid_triangulation({0.0, 0.5, 0.5, 1.0}, ys, 0.0, 1), ConfigError);
  EXPECT_THROW(grid_triangulation({0.0}, ys, 0.0, 1), ConfigError);
}

TEST(MeshIo, OffRoundTrip) {
  PolygonMesh m = quad_torus_mesh(5, 4, 1.0, 0.4);
  std::string path = temp_path("torus.off");
  write_off(m, path);
  PolygonMesh back = read_off(path);
  ASSERT_EQ(back.vertices.size(), m.vertices.size());
  ASSERT_EQ(back.faces, m.faces);
  for (size_t i = 0; i < m.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], m.vertices[i]);
  std::filesystem::remove(path);
  EXPECT_THROW(read_off(temp_path("missing.off")), IoError);
}

TEST(MeshIo, EdgeList) {
  std::string path = temp_path("edges.txt");
  {
    std::ofstream out(path);
    out << "# square\nvertices 5\n0 1\n1 2\n2 3\n3 0\n";
  }
  Graph g = read_edge_list(path);
  EXPECT_EQ(g.vertex_count, 5);
  EXPECT_EQ(g.edges.size(), 4u);
  EXPECT_EQ(betti_numbers(clique_complex(g, 2), 1), (std::vector<int>{2, 1}));
  {
    std::ofstream out(path);
    out << "0 1 2\n";
  }
  EXPECT_THROW(read_edge_list(path), IoError);
  std::filesystem::remove(path);
}
