#include "biglap/cli.hpp"

#include "biglap/decomposition.hpp"
#include "biglap/exact_spectra.hpp"
#include "biglap/simplicial.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

namespace biglap::cli {

namespace {

const char* kHeader = "# config:";

// Options shared by the grid commands.
struct ShapeOptions {
  std::string shape = "disk";
  std::optional<double> big_r;
  std::optional<double> small_r;
  std::optional<double> side;
  std::string grid = "auto";
  std::optional<double> lg;
  int padding = 2;
  std::string sdf_path;
};

struct Config {
  ShapeOptions shape;
  int k = 0;
  std::string bc = "normal";
  std::string kind = "hodge";
  long long m = 40;
  std::optional<double> eps;
  double tol = 1e-9;
  std::string out = "-";
  std::string svg;
  std::string lgs;
  std::uint64_t seed = 1;
  std::string input = "random";
  std::string field;
  std::string stars = "hodge";
  std::string out_prefix;
  std::string mesh;
  std::string quad_torus;
  std::string graph;
  bool clique = false;
  int max_dim = 2;
  std::string method = "both";
  std::string exact_bc = "dirichlet";
  int bessel = -1;
  bool derivative = false;
  int count = 5;
};

void add_shape_options(CLI::App* cmd, ShapeOptions& s) {
  cmd->add_option("--shape", s.shape, "disk|square|ball|cube|torus|shell");
  cmd->add_option("--R", s.big_r, "radius (disk, ball), major radius (torus), outer radius (shell)");
  cmd->add_option("--r", s.small_r, "minor radius (torus), inner radius (shell)");
  cmd->add_option("--side", s.side, "side length (square, cube)");
  cmd->add_option("--grid", s.grid, "auto|fig-example");
  cmd->add_option("--lg", s.lg, "grid length");
  cmd->add_option("--padding", s.padding, "cells of padding around the shape");
  cmd->add_option("--sdf", s.sdf_path, "SDF file to use instead of an analytic shape");
}

Shape make_shape(const ShapeOptions& o, const Point& center) {
  ShapeKind kind = parse_shape_kind(o.shape);
  Shape s;
  switch (kind) {
    case ShapeKind::kDisk: s = make_disk(o.big_r.value_or(1.0), center); break;
    case ShapeKind::kBall: s = make_ball(o.big_r.value_or(1.0), center); break;
    case ShapeKind::kSquare: s = make_square(o.side.value_or(1.0), center); break;
    case ShapeKind::kCube: s = make_cube(o.side.value_or(1.0), center); break;
    case ShapeKind::kTorus: s = make_torus(o.big_r.value_or(0.7), o.small_r.value_or(0.3), center); break;
    case ShapeKind::kShell: s = make_shell(o.big_r.value_or(1.0), o.small_r.value_or(0.5), center); break;
  }
  s.validate();
  return s;
}

struct Domain {
  ScalarField field;
  std::optional<Shape> shape;
  double spacing = 0.0;
};

Domain make_domain(const ShapeOptions& o, std::optional<double> lg_override = std::nullopt) {
  Domain d;
  if (!o.sdf_path.empty()) {
    if (o.grid != "auto") throw ConfigError("--grid cannot be combined with --sdf");
    d.field = load_sdf(o.sdf_path);
    d.spacing = d.field.grid.spacing();
    return d;
  }
  std::optional<double> lg = lg_override ? lg_override : o.lg;
  if (o.grid == "fig-example") {
    if (lg && *lg != 1.0) throw ConfigError("the fig-example grid has l_g = 1");
    GridComplex g = fig_example_grid();
    Shape s = make_shape(o, Point(1.5, 1.5, 0.0));
    if (s.dim() != 2) throw ConfigError("the fig-example grid is two-dimensional");
    d.field = sample_sdf(s, g);
    d.shape = s;
    d.spacing = 1.0;
    return d;
  }
  if (o.grid != "auto") throw ConfigError("unknown grid '" + o.grid + "'");
  if (!lg) throw ConfigError("--lg is required");
  if (!(*lg > 0.0)) throw ConfigError("--lg must be positive");
  if (o.padding < 1) throw ConfigError("--padding must be at least 1");
  Shape s = make_shape(o, Point::Zero());
  GridComplex g = grid_for_shape(s, *lg, o.padding);
  d.field = sample_sdf(s, g);
  d.shape = s;
  d.spacing = *lg;
  return d;
}

int field_dim(const Domain& d) { return d.field.grid.dim(); }

/// Scalar reference spectrum matching L_{k,bc} when k is 0 or dim.
std::optional<std::vector<double>> exact_reference(const Domain& d, int k, Bc bc, Index m) {
  if (!d.shape) return std::nullopt;
  const int dim = d.shape->dim();
  ScalarBc sbc;
  if ((k == 0 && bc == Bc::kNormal) || (k == dim && bc == Bc::kTangential))
    sbc = ScalarBc::kDirichlet;
  else if ((k == 0 && bc == Bc::kTangential) || (k == dim && bc == Bc::kNormal))
    sbc = ScalarBc::kNeumann;
  else
    return std::nullopt;
  const Shape& s = *d.shape;
  switch (s.kind) {
    case ShapeKind::kDisk: return disk_spectrum(s.a, sbc, m);
    case ShapeKind::kSquare: return box_spectrum({s.a, s.a}, sbc, m);
    case ShapeKind::kCube: return box_spectrum({s.a, s.a, s.a}, sbc, m);
    case ShapeKind::kBall: return ball_spectrum(s.a, sbc, m);
    case ShapeKind::kShell: return shell_spectrum(s.a, s.b, sbc, m);
    case ShapeKind::kTorus: return std::nullopt;
  }
  return std::nullopt;
}

std::string config_line(const std::string& command, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string line = std::string(kHeader) + " command=" + command;
  for (const auto& [k, v] : kv) line += " " + k + "=" + (v.empty() ? "-" : v);
  return line;
}

std::string opt_str(const std::optional<double>& v) { return v ? format_number(*v) : std::string("default"); }

std::vector<std::pair<std::string, std::string>> shape_kv(const ShapeOptions& s) {
  return {{"shape", s.sdf_path.empty() ? s.shape : "sdf"},
          {"R", opt_str(s.big_r)},
          {"r", opt_str(s.small_r)},
          {"side", opt_str(s.side)},
          {"grid", s.grid},
          {"lg", opt_str(s.lg)},
          {"padding", std::to_string(s.padding)},
          {"sdf", s.sdf_path}};
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

void check_degree(int k, int dim) {
  if (k < 0 || k > dim) throw ConfigError("--k must lie in 0.." + std::to_string(dim));
}

void check_m(long long m) {
  if (m < 0) throw ConfigError("--m must be non-negative");
}

double eps_for(const Config& c, double spacing) {
  double eps = c.eps.value_or(default_eps(spacing));
  if (!(eps > 0.0)) throw ConfigError("--eps must be positive");
  return eps;
}

EigenOptions eigen_options(const Config& c) {
  if (!(c.tol > 0.0 && c.tol < 1.0)) throw ConfigError("--tol must lie in (0, 1)");
  EigenOptions o;
  o.tol = c.tol;
  o.want_vectors = false;
  return o;
}

// Group id and multiplicity per eigenvalue.
std::vector<std::pair<int, int>> groups_of(const SpectrumResult& r) {
  double zero_tol = 0.0;
  for (int i = 0; i < r.kernel_dim && i < r.eigenvalues.size(); ++i) zero_tol = std::max(zero_tol, std::abs(r.eigenvalues[i]));
  if (r.kernel_dim > 0) zero_tol *= 1.0 + 1e-12;
  auto groups = group_multiplicities(r.eigenvalues, 1e-6, zero_tol);
  std::vector<std::pair<int, int>> out;
  for (size_t g = 0; g < groups.size(); ++g)
    for (int j = 0; j < groups[g].second; ++j) out.emplace_back(static_cast<int>(g), groups[g].second);
  return out;
}

SpectrumResult solve_system(const Domain& d, const Config& c, double spacing) {
  const int dim = field_dim(d);
  check_degree(c.k, dim);
  const Bc bc = parse_bc(c.bc);
  const LaplacianKind kind = parse_kind(c.kind);
  LaplacianSystem sys = laplacian_system(d.field.grid, d.field, c.k, bc, kind, eps_for(c, spacing));
  if (c.m > sys.size())
    throw ConfigError("--m " + std::to_string(c.m) + " exceeds the system size " + std::to_string(sys.size()));
  if (c.m == 0) return {};
  return solve_spectrum(sys, c.m, eigen_options(c));
}

int cmd_spectra(const Config& c, std::ostream& out) {
  check_m(c.m);
  Domain d = make_domain(c.shape);
  SpectrumResult r = solve_system(d, c, d.spacing);
  std::ostringstream csv;
  auto kv = shape_kv(c.shape);
  kv.insert(kv.end(), {{"k", std::to_string(c.k)},
                       {"bc", c.bc},
                       {"kind", c.kind},
                       {"m", std::to_string(c.m)},
                       {"eps", opt_str(c.eps)},
                       {"tol", format_number(c.tol)}});
  csv << config_line("spectra", kv) << '\n';
  csv << "# kernel_dim=" << r.kernel_dim << " indeterminate=" << (r.kernel_indeterminate ? 1 : 0)
      << " path=" << (r.path.empty() ? "none" : r.path) << '\n';
  csv << "index,eigenvalue,group,multiplicity\n";
  auto groups = groups_of(r);
  for (Index i = 0; i < r.eigenvalues.size(); ++i)
    csv << i << ',' << format_number(r.eigenvalues[i]) << ',' << groups[i].first << ',' << groups[i].second << '\n';
  write_output(c.out, csv.str(), out);
  return kExitOk;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) throw ConfigError("bad number '" + tok + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

int thread_count() {
  const char* env = std::getenv("BIGLAP_THREADS");
  if (!env || !*env) return 1;
  int n = 0;
  auto res = std::from_chars(env, env + std::char_traits<char>::length(env), n);
  if (res.ec != std::errc() || n < 1) throw ConfigError("BIGLAP_THREADS must be a positive integer");
  return n;
}

int cmd_convergence(const Config& c, std::ostream& out) {
  check_m(c.m);
  if (!c.shape.sdf_path.empty()) throw ConfigError("convergence sweeps need an analytic shape");
  std::vector<double> lgs = parse_list(c.lgs);
  for (double lg : lgs)
    if (!(lg > 0.0)) throw ConfigError("grid lengths must be positive");
  std::sort(lgs.begin(), lgs.end(), std::greater<>());
  lgs.erase(std::unique(lgs.begin(), lgs.end()), lgs.end());
  // Validate the shared configuration before any solve.
  parse_bc(c.bc);
  parse_kind(c.kind);
  eigen_options(c);
  make_shape(c.shape, Point::Zero());

  std::vector<SpectrumResult> results(lgs.size());
  std::vector<std::exception_ptr> errors(lgs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < lgs.size(); i = next++) {
      try {
        Domain d = make_domain(c.shape, lgs[i]);
        results[i] = solve_system(d, c, lgs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(thread_count(), static_cast<int>(lgs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  Domain ref_domain;
  ref_domain.shape = make_shape(c.shape, Point::Zero());
  auto exact = exact_reference(ref_domain, c.k, parse_bc(c.bc), c.m);

  std::ostringstream csv;
  auto kv = shape_kv(c.shape);
  kv.insert(kv.end(), {{"lgs", c.lgs},
                       {"k", std::to_string(c.k)},
                       {"bc", c.bc},
                       {"kind", c.kind},
                       {"m", std::to_string(c.m)},
                       {"eps", opt_str(c.eps)},
                       {"tol", format_number(c.tol)}});
  csv << config_line("convergence", kv) << '\n';
  csv << "lg,index,eigenvalue,exact,relative_error\n";
  std::vector<Series> series;
  for (size_t i = 0; i < lgs.size(); ++i) {
    Series s;
    s.label = "l_g = " + format_number(lgs[i]);
    const Vector& ev = results[i].eigenvalues;
    for (Index j = 0; j < ev.size(); ++j) {
      csv << format_number(lgs[i]) << ',' << j << ',' << format_number(ev[j]);
      if (exact) {
        double e = (*exact)[j];
        csv << ',' << format_number(e) << ',';
        if (e != 0.0)
          csv << format_number(std::abs(ev[j] - e) / e);
        else
          csv << "nan";
      } else {
        csv << ",nan,nan";
      }
      csv << '\n';
      s.x.push_back(static_cast<double>(j + 1));
      s.y.push_back(ev[j]);
    }
    series.push_back(std::move(s));
  }
  if (exact) {
    Series s;
    s.label = "exact";
    s.dashed = true;
    for (size_t j = 0; j < exact->size(); ++j) {
      s.x.push_back(static_cast<double>(j + 1));
      s.y.push_back((*exact)[j]);
    }
    series.push_back(std::move(s));
  }
  std::string svg;
  if (!c.svg.empty())
    svg = render_svg(series, c.shape.shape + " L_" + std::to_string(c.k) + " " + c.bc + " (" + c.kind + ")",
                     "eigenvalue index", "eigenvalue");
  write_output(c.out, csv.str(), out);
  if (!c.svg.empty()) write_output(c.svg, svg, out);
  return kExitOk;
}

BettiMethod parse_method(const std::string& m) {
  if (m == "exact") return BettiMethod::kExactRank;
  if (m == "eigen") return BettiMethod::kEigenKernel;
  if (m == "both") return BettiMethod::kBoth;
  throw ConfigError("unknown Betti method '" + m + "'");
}

std::pair<Index, Index> parse_pair(const std::string& text) {
  auto pos = text.find_first_of(",x");
  if (pos == std::string::npos) throw ConfigError("expected NU,NV");
  auto v = parse_list(text.substr(0, pos) + "," + text.substr(pos + 1));
  if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] < 3 || v[1] < 3)
    throw ConfigError("quad torus needs two integers >= 3");
  return {static_cast<Index>(v[0]), static_cast<Index>(v[1])};
}

int cmd_betti(const Config& c, std::ostream& out) {
  std::ostringstream csv;
  const int sources = !c.mesh.empty() + !c.quad_torus.empty() + !c.graph.empty();
  if (sources > 1) throw ConfigError("give at most one of --mesh, --quad-torus, --graph");
  if (sources == 1) {
    const BettiMethod method = parse_method(c.method);
    if (c.max_dim < 0 || c.max_dim > 3) throw ConfigError("--max-dim must lie in 0..3");
    std::vector<int> betti;
    std::string source;
    if (!c.graph.empty()) {
      Graph g = read_edge_list(c.graph);
      betti = betti_numbers(clique_complex(g, c.max_dim), c.max_dim, method);
      source = "clique";
    } else {
      PolygonMesh mesh = !c.mesh.empty() ? read_off(c.mesh) : [&] {
        auto [nu, nv] = parse_pair(c.quad_torus);
        return quad_torus_mesh(nu, nv, 1.0, 0.4);
      }();
      if (c.clique) {
        betti = betti_numbers(clique_complex(mesh_graph(mesh), c.max_dim), c.max_dim, method);
        source = "clique";
      } else {
        betti = betti_numbers(cell_chain_complex(mesh), method);
        source = "cells";
      }
    }
    csv << config_line("betti", {{"mesh", c.mesh},
                                 {"quad_torus", c.quad_torus},
                                 {"graph", c.graph},
                                 {"clique", c.clique ? "1" : "0"},
                                 {"max_dim", std::to_string(c.max_dim)},
                                 {"method", c.method}})
        << '\n';
    csv << "degree,betti,source\n";
    for (size_t k = 0; k < betti.size(); ++k) csv << k << ',' << betti[k] << ',' << source << '\n';
    write_output(c.out, csv.str(), out);
    return kExitOk;
  }
  Domain d = make_domain(c.shape);
  const int dim = field_dim(d);
  const LaplacianKind kind = parse_kind(c.kind);
  const long long m = c.m == 40 ? 8 : c.m;
  if (m < 2) throw ConfigError("--m must be at least 2 for kernel detection");
  RestrictedComplex cx = build_restricted_complex(d.field.grid, d.field, Bc::kNormal, kind == LaplacianKind::kHodge,
                                                  eps_for(c, d.spacing));
  auto kv = shape_kv(c.shape);
  kv.insert(kv.end(), {{"kind", c.kind}, {"m", std::to_string(m)}, {"eps", opt_str(c.eps)}, {"tol", format_number(c.tol)}});
  csv << config_line("betti", kv) << '\n';
  csv << "degree,betti,laplacian,indeterminate\n";
  for (int b = 0; b < dim; ++b) {
    const int k = dim - b;  // beta_b = dim ker L_{dim-b,n}
    LaplacianSystem sys = assemble(cx, k, kind);
    Index mm = std::min<Index>(m, sys.size());
    SpectrumResult r = solve_spectrum(sys, mm, eigen_options(c));
    if (r.kernel_dim >= mm) r.kernel_indeterminate = true;
    csv << b << ',' << r.kernel_dim << ",L_" << k << "n," << (r.kernel_indeterminate ? 1 : 0) << '\n';
  }
  write_output(c.out, csv.str(), out);
  return kExitOk;
}

Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector v(n);
  // Deterministic across standard libraries: 53 random bits mapped to [-1, 1).
  for (Index i = 0; i < n; ++i) v[i] = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
  return v;
}

int cmd_decompose(const Config& c, std::ostream& out) {
  Domain d = make_domain(c.shape);
  if (field_dim(d) < 2) throw ConfigError("decomposition needs a 2D or 3D domain");
  const Bc bc = parse_bc(c.bc);
  const double eps = eps_for(c, d.spacing);
  if (c.stars != "hodge" && c.stars != "identity") throw ConfigError("--stars must be hodge or identity");
  RestrictedComplex cx = build_restricted_complex(d.field.grid, d.field, bc, true, eps);
  DecompositionContext metric = DecompositionContext::from_complex(cx);
  DecompositionContext ctx = c.stars == "hodge" ? metric : DecompositionContext::identity(cx);

  DiscreteForm form;
  std::string input = c.field.empty() ? c.input : "file";
  if (!c.field.empty()) {
    form = load_form(c.field);
    if (form.k != 1 || form.values.size() != cx.size(1))
      throw ConfigError("field file does not hold a 1-form on this complex (" + std::to_string(cx.size(1)) + " cells)");
  } else if (c.input == "random") {
    form = {1, random_vector(cx.size(1), c.seed)};
  } else if (c.input == "gradient") {
    form = {1, cx.d[0] * random_vector(cx.size(0), c.seed)};
  } else if (c.input == "comb-harmonic") {
    RestrictedComplex closed = build_closed_complex(d.field.grid, d.field);
    LaplacianSystem sys = assemble(closed, 1, LaplacianKind::kCombinatorial);
    if (sys.size() < 2) throw ConfigError("closed subcomplex has too few edges");
    EigenOptions o = eigen_options(c);
    o.want_vectors = true;
    SpectrumResult r = solve_spectrum(sys, std::min<Index>(6, sys.size()), o);
    if (r.kernel_dim < 1) throw NumericalError("closed subcomplex has no combinatorially harmonic 1-form");
    DiscreteForm h{1, r.eigenvectors.col(0)};
    form = bc == Bc::kTangential ? primal_edges_to_tangential(h, d.field.grid, closed.masks[1], cx)
                                 : transfer_form(h, closed.masks[1], cx.masks[1]);
  } else {
    throw ConfigError("unknown --input '" + c.input + "'");
  }

  Decomposition dec = decompose(form, ctx, 1e-10);
  DecompositionReport rep = report(form, dec, metric);
  auto kv = shape_kv(c.shape);
  kv.insert(kv.end(), {{"bc", c.bc},
                       {"stars", c.stars},
                       {"input", input},
                       {"field", c.field},
                       {"seed", std::to_string(c.seed)},
                       {"eps", opt_str(c.eps)}});
  std::ostringstream csv;
  csv << config_line("decompose", kv) << '\n';
  csv << "quantity,value\n";
  csv << "edges," << form.values.size() << '\n';
  csv << "input_norm," << format_number(rep.input_norm) << '\n';
  csv << "exact_fraction," << format_number(rep.exact_fraction) << '\n';
  csv << "coexact_fraction," << format_number(rep.coexact_fraction) << '\n';
  csv << "harmonic_fraction," << format_number(rep.harmonic_fraction) << '\n';
  csv << "reconstruction_residual," << format_number(rep.reconstruction) << '\n';
  csv << "orthogonality_residual," << format_number(rep.orthogonality) << '\n';
  csv << "exact_curl_residual," << format_number(rep.exact_curl) << '\n';
  csv << "coexact_div_residual," << format_number(rep.coexact_div) << '\n';
  csv << "exact_iterations," << dec.exact_iterations << '\n';
  csv << "coexact_iterations," << dec.coexact_iterations << '\n';
  if (!c.out_prefix.empty()) {
    save_form(form, c.out_prefix + ".input.form");
    save_form(dec.exact, c.out_prefix + ".exact.form");
    save_form(dec.coexact, c.out_prefix + ".coexact.form");
    save_form(dec.harmonic, c.out_prefix + ".harmonic.form");
  }
  write_output(c.out, csv.str(), out);
  return kExitOk;
}

int cmd_exact(const Config& c, std::ostream& out) {
  std::ostringstream csv;
  if (c.bessel >= 0) {
    if (c.count < 1) throw ConfigError("--count must be positive");
    auto z = c.derivative ? bessel_derivative_zeros(c.bessel, c.count) : bessel_zeros(c.bessel, c.count);
    csv << config_line("exact", {{"bessel", std::to_string(c.bessel)},
                                 {"derivative", c.derivative ? "1" : "0"},
                                 {"count", std::to_string(c.count)}})
        << '\n';
    csv << "index,zero\n";
    for (size_t i = 0; i < z.size(); ++i) csv << i << ',' << format_number(z[i]) << '\n';
    write_output(c.out, csv.str(), out);
    return kExitOk;
  }
  check_m(c.m);
  ScalarBc bc = parse_scalar_bc(c.exact_bc);
  Shape s = make_shape(c.shape, Point::Zero());
  std::vector<double> ev;
  switch (s.kind) {
    case ShapeKind::kDisk: ev = disk_spectrum(s.a, bc, c.m); break;
    case ShapeKind::kSquare: ev = box_spectrum({s.a, s.a}, bc, c.m); break;
    case ShapeKind::kCube: ev = box_spectrum({s.a, s.a, s.a}, bc, c.m); break;
    case ShapeKind::kBall: ev = ball_spectrum(s.a, bc, c.m); break;
    case ShapeKind::kShell: ev = shell_spectrum(s.a, s.b, bc, c.m); break;
    case ShapeKind::kTorus: throw ConfigError("no exact spectrum for the torus");
  }
  csv << config_line("exact", {{"shape", c.shape.shape},
                               {"R", opt_str(c.shape.big_r)},
                               {"r", opt_str(c.shape.small_r)},
                               {"side", opt_str(c.shape.side)},
                               {"bc", c.exact_bc},
                               {"m", std::to_string(c.m)}})
      << '\n';
  csv << "index,eigenvalue\n";
  for (size_t i = 0; i < ev.size(); ++i) csv << i << ',' << format_number(ev[i]) << '\n';
  write_output(c.out, csv.str(), out);
  return kExitOk;
}

void report_error(std::ostream& err, const char* kind, int code, const std::string& message) {
  std::string flat = message;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  std::replace(flat.begin(), flat.end(), '\t', ' ');
  err << "error\t" << kind << '\t' << code << '\t' << flat << '\n';
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string render_svg(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel) {
  const double w = 720, h = 440, left = 70, right = 170, top = 40, bottom = 50;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };
  auto esc = [](const std::string& t) {
    std::string o;
    for (char ch : t) {
      if (ch == '<') o += "&lt;";
      else if (ch == '>') o += "&gt;";
      else if (ch == '&') o += "&amp;";
      else o += ch;
    }
    return o;
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    double xv = xmin + (xmax - xmin) * t / 5.0, yv = ymin + (ymax - ymin) * t / 5.0;
    char lab[32];
    std::snprintf(lab, sizeof lab, "%.4g", xv);
    o << "<line x1=\"" << px(xv) << "\" y1=\"" << top + ph << "\" x2=\"" << px(xv) << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>";
    o << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << lab << "</text>\n";
    std::snprintf(lab, sizeof lab, "%.4g", yv);
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << left << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << left - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << lab << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << esc(xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2
    << ")\">" << esc(ylabel) << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const char* col = series[s].dashed ? "black" : colors[s % 7];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\"";
    if (series[s].dashed) o << " stroke-dasharray=\"5,4\"";
    o << " points=\"";
    for (size_t i = 0; i < series[s].x.size(); ++i)
      o << (i ? " " : "") << px(series[s].x[i]) << ',' << py(series[s].y[i]);
    o << "\"/>\n";
    const double ly = top + 10 + 18.0 * s;
    o << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
      << "\" stroke=\"" << col << "\" stroke-width=\"1.5\"" << (series[s].dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>";
    o << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << esc(series[s].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Cubical DEC Laplacians on signed-distance domains", "biglap"};
  app.require_subcommand(1);

  auto* spectra = app.add_subcommand("spectra", "smallest eigenvalues of one Laplacian");
  add_shape_options(spectra, c.shape);
  auto add_system = [&](CLI::App* cmd) {
    cmd->add_option("--k", c.k, "form degree");
    cmd->add_option("--bc", c.bc, "normal|tangential");
    cmd->add_option("--kind", c.kind, "big|hodge|combinatorial");
    cmd->add_option("--m", c.m, "eigenvalue count");
    cmd->add_option("--eps", c.eps, "measure clamp (default 1e-4 l_g)");
    cmd->add_option("--tol", c.tol, "eigen residual tolerance");
    cmd->add_option("--out", c.out, "CSV path, - for stdout");
  };
  add_system(spectra);

  auto* conv = app.add_subcommand("convergence", "one solve per grid length, CSV and SVG");
  add_shape_options(conv, c.shape);
  add_system(conv);
  conv->add_option("--lgs", c.lgs, "comma-separated grid lengths")->required();
  conv->add_option("--svg", c.svg, "SVG plot path");

  auto* betti = app.add_subcommand("betti", "Betti numbers of a grid domain, mesh or graph");
  add_shape_options(betti, c.shape);
  betti->add_option("--kind", c.kind, "big|hodge|combinatorial (grid domains)");
  betti->add_option("--m", c.m, "eigenvalues per kernel solve (grid domains, default 8)");
  betti->add_option("--eps", c.eps, "measure clamp");
  betti->add_option("--tol", c.tol, "eigen residual tolerance");
  betti->add_option("--mesh", c.mesh, "OFF polygon mesh");
  betti->add_option("--quad-torus", c.quad_torus, "generated quad torus NU,NV");
  betti->add_option("--graph", c.graph, "edge list; clique complex");
  betti->add_flag("--clique", c.clique, "use the clique complex of the mesh edges");
  betti->add_option("--max-dim", c.max_dim, "clique complex dimension");
  betti->add_option("--method", c.method, "exact|eigen|both");
  betti->add_option("--out", c.out, "CSV path");

  auto* decomp = app.add_subcommand("decompose", "Hodge decomposition of a 1-form");
  add_shape_options(decomp, c.shape);
  decomp->add_option("--bc", c.bc, "normal|tangential");
  decomp->add_option("--eps", c.eps, "measure clamp");
  decomp->add_option("--tol", c.tol, "eigen residual tolerance (comb-harmonic input)");
  decomp->add_option("--input", c.input, "random|gradient|comb-harmonic");
  decomp->add_option("--field", c.field, "FORM file with one value per 1-cell");
  decomp->add_option("--seed", c.seed, "random seed");
  decomp->add_option("--stars", c.stars, "hodge|identity");
  decomp->add_option("--out-prefix", c.out_prefix, "write the components as FORM files");
  decomp->add_option("--out", c.out, "CSV path");

  auto* exact = app.add_subcommand("exact", "continuum reference spectra");
  exact->add_option("--shape", c.shape.shape, "disk|square|cube|ball|shell");
  exact->add_option("--R", c.shape.big_r, "radius / outer radius");
  exact->add_option("--r", c.shape.small_r, "inner radius");
  exact->add_option("--side", c.shape.side, "side length");
  exact->add_option("--bc", c.exact_bc, "dirichlet|neumann");
  exact->add_option("--m", c.m, "eigenvalue count");
  exact->add_option("--bessel", c.bessel, "zeros of J_n instead of a spectrum");
  exact->add_flag("--derivative", c.derivative, "zeros of J_n'");
  exact->add_option("--count", c.count, "number of zeros");
  exact->add_option("--out", c.out, "CSV path");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "config", kExitConfig, e.what());
    return kExitConfig;
  }
  try {
    if (spectra->parsed()) return cmd_spectra(c, out);
    if (conv->parsed()) return cmd_convergence(c, out);
    if (betti->parsed()) return cmd_betti(c, out);
    if (decomp->parsed()) return cmd_decompose(c, out);
    if (exact->parsed()) return cmd_exact(c, out);
  } catch (const ConfigError& e) {
    report_error(err, "config", kExitConfig, e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    report_error(err, "numerical", kExitNumerical, e.what());
    return kExitNumerical;
  } catch (const IoError& e) {
    report_error(err, "io", kExitIo, e.what());
    return kExitIo;
  } catch (const Error& e) {
    report_error(err, "internal", kExitNumerical, e.what());
    return kExitNumerical;
  } catch (const std::bad_alloc&) {
    report_error(err, "numerical", kExitNumerical, "out of memory");
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace biglap::cli
