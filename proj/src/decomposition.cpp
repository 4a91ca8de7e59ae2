#include "biglap/decomposition.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace biglap {

namespace {

double inf_norm(const SparseOperator& a) {
  Vector rows = Vector::Zero(a.rows());
  for (Index j = 0; j < a.outerSize(); ++j)
    for (SparseOperator::InnerIterator it(a, j); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

// Semidefinite systems are consistent here (right-hand sides lie in the range),
// so CG converges to a solution without explicit kernel deflation. The
// residual target is tol * max(|b|, reference): a right-hand side that is
// roundoff relative to the data (reference) is treated as zero rather than
// chased into the kernel.
Vector cg_solve(const SparseOperator& a, const Vector& b, double tol, double reference, int& iterations,
                const char* what) {
  iterations = 0;
  const double bn = b.norm();
  if (b.size() == 0 || bn == 0.0 || bn <= tol * reference) return Vector::Zero(b.size());
  const double rel_tol = tol * std::max(1.0, reference / bn);
  Eigen::ConjugateGradient<SparseOperator, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(rel_tol);
  cg.setMaxIterations(std::max<Index>(1000, 20 * a.rows()));
  cg.compute(a);
  Vector x = cg.solve(b);
  iterations = static_cast<int>(cg.iterations());
  double rel = (a * x - b).norm() / bn;
  if (!(rel <= 10.0 * rel_tol)) {
    std::ostringstream msg;
    msg << what << " solve stalled at relative residual " << rel << " after " << iterations << " iterations";
    throw NumericalError(msg.str());
  }
  return x;
}

// One vertex per floating component (no d0 row leaves it with a nonzero
// sum) is grounded; this removes exactly the locally constant kernel of
// d0^T S1 d0.
std::vector<char> grounded_vertices(const SparseOperator& d0) {
  const Index n = d0.cols();
  std::vector<Index> parent(n);
  for (Index i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  SparseOperator rows = d0.transpose();
  std::vector<Index> anchored_at;
  for (Index e = 0; e < rows.outerSize(); ++e) {
    Index first = -1;
    double sum = 0.0;
    for (SparseOperator::InnerIterator it(rows, e); it; ++it) {
      if (it.value() == 0.0) continue;
      sum += it.value();
      if (first < 0)
        first = it.row();
      else
        parent[find(it.row())] = find(first);
    }
    if (first >= 0 && sum != 0.0) anchored_at.push_back(first);
  }
  std::vector<char> anchored(n, 0);
  for (Index v : anchored_at) anchored[find(v)] = 1;
  std::vector<char> ground(n, 0);
  std::vector<char> seen(n, 0);
  for (Index i = 0; i < n; ++i) {
    Index r = find(i);
    if (!seen[r]) {
      seen[r] = 1;
      ground[i] = !anchored[r];
    }
  }
  return ground;
}

void check_form(const DiscreteForm& form, const DecompositionContext& ctx, int k) {
  if (form.k != k) throw ConfigError("expected a " + std::to_string(k) + "-form");
  if (form.values.size() != ctx.size(k))
    throw ConfigError("form has " + std::to_string(form.values.size()) + " values, complex has " +
                      std::to_string(ctx.size(k)) + " cells");
}

}  // namespace

Index DecompositionContext::size(int k) const {
  switch (k) {
    case 0: return d0.cols();
    case 1: return d0.rows();
    case 2: return d1.rows();
    default: throw ConfigError("decomposition handles degrees 0..2");
  }
}

void DecompositionContext::validate() const {
  if (d1.cols() != d0.rows()) throw ConfigError("coboundary shapes do not chain");
  if (s0.size() != d0.cols() || s1.size() != d0.rows() || s2.size() != d1.rows())
    throw ConfigError("star sizes do not match the coboundaries");
  for (const Vector* s : {&s0, &s1, &s2})
    if (s->size() && !(s->minCoeff() > 0.0)) throw ConfigError("stars must be positive");
}

DecompositionContext DecompositionContext::from_complex(const RestrictedComplex& cx) {
  if (cx.dim < 2) throw ConfigError("decomposition needs a complex of dimension >= 2");
  if (!cx.has_stars()) throw ConfigError("complex was built without stars");
  DecompositionContext ctx;
  ctx.bc = cx.bc;
  ctx.d0 = cx.d[0];
  ctx.d1 = cx.d[1];
  ctx.s0 = cx.star[0];
  ctx.s1 = cx.star[1];
  ctx.s2 = cx.star[2];
  ctx.validate();
  return ctx;
}

DecompositionContext DecompositionContext::identity(const RestrictedComplex& cx) {
  if (cx.dim < 2) throw ConfigError("decomposition needs a complex of dimension >= 2");
  DecompositionContext ctx;
  ctx.bc = cx.bc;
  ctx.d0 = cx.d[0];
  ctx.d1 = cx.d[1];
  ctx.s0 = Vector::Ones(cx.size(0));
  ctx.s1 = Vector::Ones(cx.size(1));
  ctx.s2 = Vector::Ones(cx.size(2));
  return ctx;
}

Decomposition decompose(const DiscreteForm& form, const DecompositionContext& ctx, double tol) {
  ctx.validate();
  check_form(form, ctx, 1);
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  const Vector& w = form.values;
  Decomposition out;

  // Gradient part with floating components grounded; d0 annihilates the
  // dropped constants, so the exact part is unchanged.
  Vector rhs0 = ctx.d0.transpose() * (ctx.s1.asDiagonal() * w);
  const std::vector<char> ground = grounded_vertices(ctx.d0);
  InclusionMask keep = InclusionMask::from_flags(0, [&] {
    std::vector<char> flags(ground.size());
    for (size_t i = 0; i < ground.size(); ++i) flags[i] = !ground[i];
    return flags;
  }());
  SparseOperator d0k = restrict_operator(ctx.d0, InclusionMask::from_flags(1, std::vector<char>(ctx.d0.rows(), 1)), keep);
  SparseOperator grad_normal = d0k.transpose() * ctx.s1.asDiagonal() * d0k;
  Vector rhs0k(keep.size());
  for (Index i = 0; i < keep.size(); ++i) rhs0k[i] = rhs0[keep.cells[i]];
  const double ref0 = inf_norm(ctx.d0) * (ctx.s1.asDiagonal() * w).norm();
  Vector alpha = cg_solve(grad_normal, rhs0k, tol, ref0, out.exact_iterations, "exact-part");
  Vector exact = d0k * alpha;

  Vector rest = w - exact;
  SparseOperator curl_normal = ctx.d1 * ctx.s1.cwiseInverse().asDiagonal() * ctx.d1.transpose();
  Vector rhs1 = ctx.d1 * rest;
  const double ref1 = inf_norm(ctx.d1) * rest.norm();
  Vector gamma = cg_solve(curl_normal, rhs1, tol, ref1, out.coexact_iterations, "coexact-part");
  Vector coexact = ctx.s1.cwiseInverse().asDiagonal() * (ctx.d1.transpose() * gamma);

  out.exact = {1, exact};
  out.coexact = {1, coexact};
  out.harmonic = {1, rest - coexact};
  return out;
}

DiscreteForm discrete_curl(const DiscreteForm& form, const DecompositionContext& ctx) {
  check_form(form, ctx, 1);
  return {2, ctx.d1 * form.values};
}

DiscreteForm discrete_div(const DiscreteForm& form, const DecompositionContext& ctx) {
  check_form(form, ctx, 1);
  return {0, ctx.s0.cwiseInverse().asDiagonal() * (ctx.d0.transpose() * (ctx.s1.asDiagonal() * form.values))};
}

double s_inner(const DecompositionContext& ctx, const Vector& a, const Vector& b) {
  if (a.size() != ctx.s1.size() || b.size() != ctx.s1.size()) throw ConfigError("1-form size mismatch");
  return a.dot(ctx.s1.asDiagonal() * b);
}

double s_norm(const DecompositionContext& ctx, const Vector& a) { return std::sqrt(std::max(0.0, s_inner(ctx, a, a))); }

DecompositionReport report(const DiscreteForm& input, const Decomposition& dec, const DecompositionContext& metric) {
  check_form(input, metric, 1);
  DecompositionReport r;
  const Vector& w = input.values;
  const Vector& e = dec.exact.values;
  const Vector& c = dec.coexact.values;
  const Vector& h = dec.harmonic.values;
  r.input_norm = s_norm(metric, w);
  if (r.input_norm == 0.0) return r;
  r.exact_fraction = s_norm(metric, e) / r.input_norm;
  r.coexact_fraction = s_norm(metric, c) / r.input_norm;
  r.harmonic_fraction = s_norm(metric, h) / r.input_norm;
  r.reconstruction = (w - e - c - h).norm() / w.norm();
  const double n2 = r.input_norm * r.input_norm;
  r.orthogonality = std::max({std::abs(s_inner(metric, e, c)), std::abs(s_inner(metric, e, h)),
                              std::abs(s_inner(metric, c, h))}) /
                    n2;
  const double d1n = inf_norm(metric.d1);
  if (d1n > 0.0) r.exact_curl = (metric.d1 * e).norm() / (d1n * w.norm());
  const double d0n = inf_norm(metric.d0);
  const Vector sw = metric.s1.asDiagonal() * w;
  if (d0n > 0.0 && sw.norm() > 0.0)
    r.coexact_div = (metric.d0.transpose() * (metric.s1.asDiagonal() * c)).norm() / (d0n * sw.norm());
  return r;
}

DiscreteForm transfer_form(const DiscreteForm& form, const InclusionMask& from, const InclusionMask& to) {
  if (from.k != form.k || to.k != form.k) throw ConfigError("mask degree does not match the form");
  if (from.total() != to.total()) throw ConfigError("masks belong to different grids");
  if (form.values.size() != from.size()) throw ConfigError("form length does not match its mask");
  DiscreteForm out{form.k, Vector::Zero(to.size())};
  for (Index i = 0; i < from.size(); ++i) {
    Index j = to.reindex[from.cells[i]];
    if (j >= 0)
      out.values[j] = form.values[i];
    else if (form.values[i] != 0.0)
      throw ConfigError("form is nonzero on a cell the target mask drops");
  }
  return out;
}

void save_form(const DiscreteForm& form, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "FORM " << form.k << ' ' << form.values.size() << '\n';
  out.precision(17);
  for (Index i = 0; i < form.values.size(); ++i) out << form.values[i] << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

DiscreteForm load_form(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string magic;
  int k = -1;
  long long n = -1;
  if (!(in >> magic >> k >> n) || magic != "FORM" || k < 0 || k > 3 || n < 0)
    throw IoError("'" + path + "' is not a FORM file");
  DiscreteForm form{k, Vector(n)};
  for (long long i = 0; i < n; ++i)
    if (!(in >> form.values[i])) throw IoError("'" + path + "' ends after " + std::to_string(i) + " values");
  std::string extra;
  if (in >> extra) throw IoError("trailing data in '" + path + "'");
  return form;
}

}  // namespace biglap

namespace biglap {

namespace {

// Dual cell of the dual grid that a primal cell pierces: spanned axes become
// the complement, lowest corner drops by one along the complement.
Index dual_index(const GridComplex& grid, const GridComplex& dual, const CellId& cell) {
  const int dim = grid.dim();
  const int dk = dim - cell.k;
  std::vector<int> spanned(grid.class_axes(cell.k, cell.axis_class).begin(),
                           grid.class_axes(cell.k, cell.axis_class).end());
  std::vector<int> comp;
  for (int a = 0; a < dim; ++a)
    if (std::find(spanned.begin(), spanned.end(), a) == spanned.end()) comp.push_back(a);
  CellId out;
  out.k = dk;
  out.axis_class = -1;
  for (int c = 0; c < dual.class_count(dk); ++c) {
    auto axes = dual.class_axes(dk, c);
    if (std::is_permutation(axes.begin(), axes.end(), comp.begin(), comp.end())) out.axis_class = c;
  }
  if (out.axis_class < 0) throw Error("internal: no dual class for cell");
  out.coords = cell.coords;
  for (int a : comp) out.coords[a] -= 1;
  for (int a = 0; a < 3; ++a)
    if (out.coords[a] < 0) return -1;
  return dual.contains(out) ? dual.index_of(out) : -1;
}

}  // namespace

DiscreteForm primal_edges_to_tangential(const DiscreteForm& form, const GridComplex& grid, const InclusionMask& primal,
                                        const RestrictedComplex& tangential) {
  if (tangential.bc != Bc::kTangential) throw ConfigError("target complex is not tangential");
  if (form.k != 1 || primal.k != 1) throw ConfigError("expected an edge form");
  if (form.values.size() != primal.size()) throw ConfigError("form length does not match its mask");
  if (primal.total() != grid.cell_count(1)) throw ConfigError("mask does not belong to the grid");
  const GridComplex& dual = tangential.grid;
  if (dual.cell_count(0) != grid.dual().cell_count(0)) throw ConfigError("tangential complex is not on this grid's dual");
  const InclusionMask& t0 = tangential.masks[0];
  const InclusionMask& t1 = tangential.masks[1];
  const SparseOperator d0_rows = SparseOperator(tangential.d[0].transpose());  // column j = row j of d0

  std::vector<int> class_sign(grid.class_count(1), 0);
  std::vector<Index> target(primal.size(), -1);
  for (Index i = 0; i < primal.size(); ++i) {
    CellId e = grid.cell_of(1, primal.cells[i]);
    Index di = dual_index(grid, dual, e);
    Index j = di >= 0 ? t1.reindex[di] : -1;
    target[i] = j;
    if (j < 0) continue;
    auto verts = grid.cell_vertices(e);
    CellId head{0, 0, {0, 0, 0}};
    for (int a = 0; a < 3; ++a) head.coords[a] = grid.cell_of(0, verts[1]).coords[a];
    Index dh = dual_index(grid, dual, head);
    Index h = dh >= 0 ? t0.reindex[dh] : -1;
    if (h < 0) continue;
    double v = d0_rows.coeff(h, j);
    if (v == 0.0) throw Error("internal: dual incidence missing");
    int s = v > 0 ? 1 : -1;
    if (class_sign[e.axis_class] == 0) class_sign[e.axis_class] = s;
    if (class_sign[e.axis_class] != s) throw Error("internal: inconsistent dual orientation");
  }
  DiscreteForm out{1, Vector::Zero(t1.size())};
  for (Index i = 0; i < primal.size(); ++i) {
    const double v = form.values[i];
    if (target[i] < 0) {
      if (v != 0.0) throw ConfigError("form is nonzero on an edge the tangential complex drops");
      continue;
    }
    int s = class_sign[grid.cell_of(1, primal.cells[i]).axis_class];
    if (s == 0 && v != 0.0) throw ConfigError("cannot orient an isolated edge");
    out.values[target[i]] = s * v;
  }
  return out;
}

}  // namespace biglap
