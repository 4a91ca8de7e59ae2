#include "biglap/simplicial.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace biglap {

namespace {

using Rational = boost::multiprecision::cpp_rational;

SparseOperator from_triplets(Index rows, Index cols, const std::vector<Eigen::Triplet<double>>& t) {
  SparseOperator m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  return m;
}

std::vector<Index> face_of(const Simplex& s, size_t omit) {
  Simplex f;
  f.reserve(s.size() - 1);
  for (size_t i = 0; i < s.size(); ++i)
    if (i != omit) f.push_back(s[i]);
  return f;
}

double cross_z(const Point& u, const Point& v) { return u.x() * v.y() - u.y() * v.x(); }

}  // namespace

SimplicialComplex::SimplicialComplex(Index vertex_count) : by_dim_(4), lookup_(4) {
  if (vertex_count < 0) throw ConfigError("negative vertex count");
  for (Index v = 0; v < vertex_count; ++v) {
    lookup_[0][{v}] = v;
    by_dim_[0].push_back({v});
  }
}

void SimplicialComplex::add(Simplex simplex) {
  std::sort(simplex.begin(), simplex.end());
  if (simplex.empty() || simplex.size() > 4) throw ConfigError("simplex must have 1 to 4 vertices");
  if (std::adjacent_find(simplex.begin(), simplex.end()) != simplex.end())
    throw ConfigError("simplex has repeated vertices");
  for (Index v : simplex)
    if (v < 0 || v >= vertex_count()) throw ConfigError("simplex vertex out of range");
  const size_t n = simplex.size();
  for (size_t size = 2; size <= n; ++size)
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      if (static_cast<size_t>(__builtin_popcount(mask)) != size) continue;
      Simplex s;
      for (size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) s.push_back(simplex[i]);
      auto& table = lookup_[size - 1];
      if (table.count(s)) continue;
      table[s] = static_cast<Index>(by_dim_[size - 1].size());
      by_dim_[size - 1].push_back(s);
    }
}

int SimplicialComplex::max_dim() const {
  for (int k = 3; k >= 0; --k)
    if (!by_dim_[k].empty()) return k;
  return -1;
}

Index SimplicialComplex::count(int k) const {
  if (k < 0 || k > 3) return 0;
  return static_cast<Index>(by_dim_[k].size());
}

Index SimplicialComplex::find(const Simplex& s) const {
  if (s.empty() || s.size() > 4) return -1;
  auto it = lookup_[s.size() - 1].find(s);
  return it == lookup_[s.size() - 1].end() ? -1 : it->second;
}

SimplicialComplex clique_complex(const Graph& graph, int max_dim) {
  if (max_dim < 0 || max_dim > 3) throw ConfigError("clique complex dimension must be 0..3");
  std::vector<std::set<Index>> adj(graph.vertex_count);
  for (auto [a, b] : graph.edges) {
    if (a < 0 || b < 0 || a >= graph.vertex_count || b >= graph.vertex_count)
      throw ConfigError("edge endpoint out of range");
    if (a == b) throw ConfigError("graph has a self-loop");
    if (!adj[a].insert(b).second) throw ConfigError("graph has a duplicate edge");
    adj[b].insert(a);
  }
  SimplicialComplex complex(graph.vertex_count);
  // Grow cliques in increasing vertex order.
  std::vector<Simplex> frontier;
  for (Index v = 0; v < graph.vertex_count; ++v) frontier.push_back({v});
  for (int k = 1; k <= max_dim; ++k) {
    std::vector<Simplex> next;
    for (const auto& s : frontier)
      for (Index w : adj[s.back()]) {
        if (w <= s.back()) continue;
        bool clique = std::all_of(s.begin(), s.end(), [&](Index u) { return adj[u].count(w) > 0; });
        if (!clique) continue;
        Simplex t = s;
        t.push_back(w);
        next.push_back(t);
      }
    for (const auto& s : next) complex.add(s);
    frontier = std::move(next);
  }
  return complex;
}

SparseOperator boundary_matrix(const SimplicialComplex& complex, int k) {
  if (k < 1 || k > 3) throw ConfigError("boundary degree must be 1..3");
  std::vector<Eigen::Triplet<double>> t;
  const auto& cols = complex.simplices(k);
  for (size_t j = 0; j < cols.size(); ++j)
    for (size_t i = 0; i <= static_cast<size_t>(k); ++i)
      t.emplace_back(complex.find(face_of(cols[j], i)), static_cast<Index>(j), i % 2 == 0 ? 1.0 : -1.0);
  return from_triplets(complex.count(k - 1), complex.count(k), t);
}

SparseOperator combinatorial_laplacian_by_entries(const SimplicialComplex& complex, int k) {
  if (k < 0 || k > 3) throw ConfigError("Laplacian degree must be 0..3");
  const Index n = complex.count(k);
  const auto& simplices = complex.simplices(k);
  std::vector<double> deg_up(n, 0.0);
  for (const auto& c : (k < 3 ? complex.simplices(k + 1) : std::vector<Simplex>{}))
    for (size_t i = 0; i < c.size(); ++i) deg_up[complex.find(face_of(c, i))] += 1.0;
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, deg_up[i] + (k > 0 ? k + 1 : 0));
  if (k == 0) {
    for (const auto& e : complex.simplices(1)) {
      t.emplace_back(e[0], e[1], -1.0);
      t.emplace_back(e[1], e[0], -1.0);
    }
    return from_triplets(n, n, t);
  }
  // Simplices sharing each (k-1)-face, with their boundary coefficient.
  std::unordered_map<Index, std::vector<std::pair<Index, double>>> by_face;
  for (Index j = 0; j < n; ++j)
    for (size_t i = 0; i < simplices[j].size(); ++i)
      by_face[complex.find(face_of(simplices[j], i))].emplace_back(j, i % 2 == 0 ? 1.0 : -1.0);
  for (const auto& [face, members] : by_face)
    for (size_t a = 0; a < members.size(); ++a)
      for (size_t b = 0; b < members.size(); ++b) {
        if (a == b) continue;
        Simplex u = simplices[members[a].first];
        const auto& other = simplices[members[b].first];
        u.insert(u.end(), other.begin(), other.end());
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        bool upper = u.size() <= 4 && complex.find(u) >= 0;
        if (!upper) t.emplace_back(members[a].first, members[b].first, members[a].second * members[b].second);
      }
  return from_triplets(n, n, t);
}

SparseOperator combinatorial_laplacian(const SimplicialComplex& complex, int k) {
  if (k < 0 || k > 3) throw ConfigError("Laplacian degree must be 0..3");
  const Index n = complex.count(k);
  SparseOperator l(n, n);
  if (k < 3 && complex.count(k + 1) > 0) {
    SparseOperator b = boundary_matrix(complex, k + 1);
    l += SparseOperator(b * b.transpose());
  }
  if (k > 0) {
    SparseOperator b = boundary_matrix(complex, k);
    l += SparseOperator(b.transpose() * b);
  }
  l.prune(0.0);
  SparseOperator rule = combinatorial_laplacian_by_entries(complex, k);
  if (SparseOperator(l - rule).norm() != 0.0)
    throw Error("internal: product and entry-rule combinatorial Laplacians differ");
  return l;
}

DiagonalStar cotangent_star_1(const SimplicialComplex& tri) {
  if (!tri.positions) throw ConfigError("cotangent star needs vertex positions");
  const auto& p = *tri.positions;
  DiagonalStar star{1, Bc::kTangential, Vector::Zero(tri.count(1))};
  for (const auto& t : tri.simplices(2)) {
    for (int i = 0; i < 3; ++i) {
      Index v = t[i];
      Index a = t[(i + 1) % 3];
      Index b = t[(i + 2) % 3];
      Point u = p[a] - p[v];
      Point w = p[b] - p[v];
      double cr = std::abs(cross_z(u, w));
      if (!(cr > 1e-14 * u.norm() * w.norm())) throw ConfigError("degenerate (zero-area) triangle");
      Simplex e{std::min(a, b), std::max(a, b)};
      star.diag[tri.find(e)] += u.dot(w) / cr;
    }
  }
  return star;
}

DiagonalStar cotangent_vertex_star(const SimplicialComplex& tri) {
  if (!tri.positions) throw ConfigError("cotangent star needs vertex positions");
  const auto& p = *tri.positions;
  DiagonalStar star{0, Bc::kTangential, Vector::Zero(tri.count(0))};
  for (const auto& t : tri.simplices(2)) {
    double area = 0.5 * std::abs(cross_z(p[t[1]] - p[t[0]], p[t[2]] - p[t[0]]));
    if (!(area > 0.0)) throw ConfigError("degenerate (zero-area) triangle");
    for (Index v : t) star.diag[v] += 2.0 * area / 3.0;
  }
  return star;
}

ChainComplex chain_complex(const SimplicialComplex& complex) {
  ChainComplex chain;
  const int top = std::max(complex.max_dim(), 0);
  for (int k = 0; k <= top; ++k) chain.sizes.push_back(complex.count(k));
  for (int k = 1; k <= top; ++k) chain.boundary.push_back(boundary_matrix(complex, k));
  return chain;
}

namespace {

struct MeshEdges {
  std::map<std::pair<Index, Index>, Index> index;
  std::vector<std::pair<Index, Index>> list;
};

MeshEdges collect_edges(const PolygonMesh& mesh) {
  MeshEdges edges;
  const Index nv = static_cast<Index>(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    if (f.size() < 3) throw ConfigError("mesh face with fewer than 3 vertices");
    for (size_t i = 0; i < f.size(); ++i) {
      Index a = f[i];
      Index b = f[(i + 1) % f.size()];
      if (a < 0 || b < 0 || a >= nv || b >= nv) throw ConfigError("mesh face vertex out of range");
      if (a == b) throw ConfigError("mesh face repeats a vertex");
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (edges.index.emplace(key, static_cast<Index>(edges.list.size())).second) edges.list.push_back(key);
    }
  }
  return edges;
}

}  // namespace

ChainComplex cell_chain_complex(const PolygonMesh& mesh) {
  MeshEdges edges = collect_edges(mesh);
  const Index nv = static_cast<Index>(mesh.vertices.size());
  const Index ne = static_cast<Index>(edges.list.size());
  const Index nf = static_cast<Index>(mesh.faces.size());
  std::vector<Eigen::Triplet<double>> t1;
  for (Index e = 0; e < ne; ++e) {
    t1.emplace_back(edges.list[e].first, e, -1.0);
    t1.emplace_back(edges.list[e].second, e, 1.0);
  }
  std::vector<Eigen::Triplet<double>> t2;
  for (Index f = 0; f < nf; ++f) {
    const auto& cyc = mesh.faces[f];
    for (size_t i = 0; i < cyc.size(); ++i) {
      Index a = cyc[i];
      Index b = cyc[(i + 1) % cyc.size()];
      Index e = edges.index.at({std::min(a, b), std::max(a, b)});
      t2.emplace_back(e, f, a < b ? 1.0 : -1.0);
    }
  }
  ChainComplex chain;
  chain.sizes = {nv, ne, nf};
  chain.boundary = {from_triplets(nv, ne, t1), from_triplets(ne, nf, t2)};
  return chain;
}

Graph mesh_graph(const PolygonMesh& mesh) {
  MeshEdges edges = collect_edges(mesh);
  return Graph{static_cast<Index>(mesh.vertices.size()), edges.list};
}

Index exact_rank(const SparseOperator& matrix) {
  std::unordered_map<Index, std::map<Index, Rational>> pivots;  // lowest row -> reduced column
  Index rank = 0;
  for (int j = 0; j < matrix.outerSize(); ++j) {
    std::map<Index, Rational> col;
    for (SparseOperator::InnerIterator it(matrix, j); it; ++it) {
      double v = it.value();
      if (v == 0.0) continue;
      if (v != std::round(v)) {
        // Exact binary fraction of the double.
        int exp = 0;
        double mant = std::frexp(v, &exp);
        auto m = static_cast<long long>(std::ldexp(mant, 53));
        Rational r(m);
        exp -= 53;
        Rational two(2);
        for (; exp > 0; --exp) r *= two;
        for (; exp < 0; ++exp) r /= two;
        col[it.row()] = r;
      } else {
        col[it.row()] = Rational(static_cast<long long>(v));
      }
    }
    while (!col.empty()) {
      Index low = col.rbegin()->first;
      auto p = pivots.find(low);
      if (p == pivots.end()) {
        pivots.emplace(low, std::move(col));
        ++rank;
        break;
      }
      Rational factor = col.rbegin()->second / p->second.rbegin()->second;
      for (const auto& [row, val] : p->second) {
        Rational updated = col[row] - factor * val;
        if (updated == 0)
          col.erase(row);
        else
          col[row] = updated;
      }
    }
  }
  return rank;
}

std::vector<int> betti_numbers(const ChainComplex& chain, BettiMethod method) {
  const int top = chain.top();
  std::vector<int> exact;
  if (method != BettiMethod::kEigenKernel) {
    std::vector<Index> rank(top + 2, 0);  // rank[k] = rank of B_k
    for (int k = 1; k <= top; ++k) rank[k] = exact_rank(chain.boundary[k - 1]);
    for (int k = 0; k <= top; ++k) exact.push_back(static_cast<int>(chain.sizes[k] - rank[k] - rank[k + 1]));
  }
  if (method == BettiMethod::kExactRank) return exact;
  const Index dense_limit = 2000;
  bool eigen_feasible = std::all_of(chain.sizes.begin(), chain.sizes.end(), [&](Index n) { return n <= dense_limit; });
  if (!eigen_feasible) {
    if (method == BettiMethod::kEigenKernel) throw ConfigError("complex too large for eigen-kernel Betti numbers");
    return exact;
  }
  std::vector<int> eig;
  for (int k = 0; k <= top; ++k) {
    const Index n = chain.sizes[k];
    if (n == 0) {
      eig.push_back(0);
      continue;
    }
    SparseOperator l(n, n);
    if (k < top) l += SparseOperator(chain.boundary[k] * chain.boundary[k].transpose());
    if (k > 0) l += SparseOperator(chain.boundary[k - 1].transpose() * chain.boundary[k - 1]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(l), Eigen::EigenvaluesOnly};
    const Vector& ev = es.eigenvalues();
    double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff()) * static_cast<double>(n);
    eig.push_back(static_cast<int>((ev.array().abs() <= tol).count()));
  }
  if (method == BettiMethod::kBoth && eig != exact)
    throw NumericalError("eigen-kernel and exact-rank Betti numbers disagree");
  return eig;
}

std::vector<int> betti_numbers(const SimplicialComplex& complex, int max_k, BettiMethod method) {
  ChainComplex chain = chain_complex(complex);
  // Include one degree above max_k so beta_max_k sees its boundaries.
  while (static_cast<int>(chain.sizes.size()) <= max_k) {
    chain.sizes.push_back(0);
    chain.boundary.push_back(SparseOperator(chain.sizes[chain.sizes.size() - 2], 0));
  }
  auto b = betti_numbers(chain, method);
  b.resize(max_k + 1);
  return b;
}

PolygonMesh quad_torus_mesh(Index nu, Index nv, double major, double minor) {
  if (nu < 3 || nv < 3) throw ConfigError("torus mesh needs at least 3 divisions per direction");
  if (!(minor > 0.0 && minor < major)) throw ConfigError("torus needs 0 < minor < major");
  PolygonMesh mesh;
  const double two_pi = 2.0 * std::acos(-1.0);
  for (Index j = 0; j < nv; ++j)
    for (Index i = 0; i < nu; ++i) {
      double u = two_pi * static_cast<double>(i) / static_cast<double>(nu);
      double v = two_pi * static_cast<double>(j) / static_cast<double>(nv);
      double rho = major + minor * std::cos(v);
      mesh.vertices.emplace_back(rho * std::cos(u), rho * std::sin(u), minor * std::sin(v));
    }
  auto id = [&](Index i, Index j) { return (j % nv) * nu + (i % nu); };
  for (Index j = 0; j < nv; ++j)
    for (Index i = 0; i < nu; ++i) mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return mesh;
}

SimplicialComplex grid_triangulation(const std::vector<double>& xs, const std::vector<double>& ys, double jitter,
                                     std::uint64_t seed) {
  if (xs.size() < 2 || ys.size() < 2) throw ConfigError("triangulation needs at least one cell per axis");
  for (const auto* c : {&xs, &ys})
    for (size_t i = 1; i < c->size(); ++i)
      if (!((*c)[i] > (*c)[i - 1])) throw ConfigError("triangulation coordinates must increase strictly");
  if (jitter < 0.0 || jitter > 0.3) throw ConfigError("jitter must be in [0, 0.3]");
  const Index nx = static_cast<Index>(xs.size()) - 1;
  const Index ny = static_cast<Index>(ys.size()) - 1;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto shift = [&](const std::vector<double>& c, Index i, Index n) {
    if (i == 0 || i == n) return 0.0;
    double gap = std::min(c[i] - c[i - 1], c[i + 1] - c[i]);
    return jitter * gap * unit(rng);
  };
  SimplicialComplex tri((nx + 1) * (ny + 1));
  std::vector<Point> pos((nx + 1) * (ny + 1));
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i) {
      double dx = shift(xs, i, nx);
      double dy = shift(ys, j, ny);
      pos[j * (nx + 1) + i] = Point(xs[i] + dx, ys[j] + dy, 0.0);
    }
  auto id = [&](Index i, Index j) { return j * (nx + 1) + i; };
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) {
      Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tri.add({a, b, c});
        tri.add({a, c, d});
      } else {
        tri.add({a, b, d});
        tri.add({b, c, d});
      }
    }
  tri.positions = std::move(pos);
  return tri;
}

SimplicialComplex square_triangulation(Index n, double grading, double jitter, std::uint64_t seed) {
  if (n < 1) throw ConfigError("triangulation needs at least one cell per side");
  if (!(grading > 0.0)) throw ConfigError("grading exponent must be positive");
  std::vector<double> coord(n + 1);
  for (Index i = 0; i <= n; ++i) coord[i] = std::pow(static_cast<double>(i) / static_cast<double>(n), grading);
  return grid_triangulation(coord, coord, jitter, seed);
}

PolygonMesh read_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> tokens;
  for (std::string line; std::getline(in, line);) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    for (std::string t; ls >> t;) tokens.push_back(t);
  }
  size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw IoError("truncated OFF file");
    return tokens[pos++];
  };
  auto as_index = [&](const std::string& s) {
    try {
      size_t used = 0;
      long long v = std::stoll(s, &used);
      if (used != s.size() || v < 0) throw IoError("bad integer '" + s + "' in OFF file");
      return static_cast<Index>(v);
    } catch (const std::logic_error&) {
      throw IoError("bad integer '" + s + "' in OFF file");
    }
  };
  auto as_real = [&](const std::string& s) {
    try {
      size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw IoError("bad number '" + s + "' in OFF file");
      return v;
    } catch (const std::logic_error&) {
      throw IoError("bad number '" + s + "' in OFF file");
    }
  };
  if (next() != "OFF") throw IoError("missing OFF header");
  Index nv = as_index(next());
  Index nf = as_index(next());
  as_index(next());
  PolygonMesh mesh;
  for (Index v = 0; v < nv; ++v) {
    double x = as_real(next());
    double y = as_real(next());
    double z = as_real(next());
    mesh.vertices.emplace_back(x, y, z);
  }
  for (Index f = 0; f < nf; ++f) {
    Index k = as_index(next());
    std::vector<Index> face;
    for (Index i = 0; i < k; ++i) {
      Index v = as_index(next());
      if (v >= nv) throw IoError("OFF face references a missing vertex");
      face.push_back(v);
    }
    mesh.faces.push_back(std::move(face));
  }
  return mesh;
}

void write_off(const PolygonMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.precision(17);
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) {
    out << f.size();
    for (Index v : f) out << ' ' << v;
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Graph g;
  Index declared = -1;
  Index max_id = -1;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    if (a == "vertices") {
      if (!(ls >> declared) || declared < 0) throw IoError("bad vertex count on line " + std::to_string(line_no));
      continue;
    }
    if (!(ls >> b) || (ls >> extra)) throw IoError("expected 'u v' on line " + std::to_string(line_no));
    try {
      Index u = std::stoll(a);
      Index v = std::stoll(b);
      if (u < 0 || v < 0) throw IoError("negative vertex id on line " + std::to_string(line_no));
      g.edges.emplace_back(u, v);
      max_id = std::max({max_id, u, v});
    } catch (const std::logic_error&) {
      throw IoError("bad vertex id on line " + std::to_string(line_no));
    }
  }
  g.vertex_count = declared >= 0 ? declared : max_id + 1;
  if (max_id >= g.vertex_count) throw IoError("edge references a vertex beyond the declared count");
  return g;
}

}  // namespace biglap
