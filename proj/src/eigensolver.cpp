#include "biglap/eigensolver.hpp"

#include <Eigen/CholmodSupport>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace biglap {

namespace {

double inf_norm(const SparseOperator& a) {
  Vector rows = Vector::Zero(a.rows());
  for (int j = 0; j < a.outerSize(); ++j)
    for (SparseOperator::InnerIterator it(a, j); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double pair_residual(const SparseOperator& l, const Vector& mass, double l_norm, const Vector& x, double lambda) {
  Vector r = l * x - lambda * mass.cwiseProduct(x);
  double denom = std::max(l_norm, std::numeric_limits<double>::min()) * x.norm();
  return denom > 0.0 ? r.norm() / denom : 0.0;
}

SpectrumResult dense_solve(const SparseOperator& l, const Vector& mass, Index m, const EigenOptions& opt) {
  const Index n = l.rows();
  Vector s = mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd w = s.asDiagonal() * Eigen::MatrixXd(l) * s.asDiagonal();
  w = 0.5 * (w + w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigendecomposition failed");
  SpectrumResult out;
  out.path = "dense";
  out.eigenvalues = es.eigenvalues().head(m);
  Eigen::MatrixXd x = s.asDiagonal() * es.eigenvectors().leftCols(m);
  out.residuals.resize(m);
  const double l_norm = inf_norm(l);
  for (Index i = 0; i < m; ++i) out.residuals[i] = pair_residual(l, mass, l_norm, x.col(i), out.eigenvalues[i]);
  if (opt.want_vectors) out.eigenvectors = std::move(x);
  (void)n;
  return out;
}

class BlockLanczos {
 public:
  BlockLanczos(const SparseOperator& l, const Vector& mass, Index nev, const EigenOptions& opt)
      : l_(l), mass_(mass), n_(l.rows()), nev_(nev), opt_(opt), rng_(opt.seed) {
    block_ = static_cast<Index>(std::max(1, opt.block_size));
    block_ = std::min(block_, n_);
    max_dim_ = std::min(n_, std::max(2 * nev_ + 2 * block_, nev_ + 6 * block_));
    l_norm_ = inf_norm(l_);
    factorize();
  }

  SpectrumResult run() {
    Eigen::MatrixXd v(n_, max_dim_);
    Eigen::MatrixXd av(n_, max_dim_);
    Index cur = 0;
    Eigen::MatrixXd w = random_block(block_);
    int restarts = 0;
    std::vector<double> lambdas;
    std::vector<double> resid;
    Eigen::MatrixXd ritz;
    while (true) {
      Index added = append(v, av, cur, w);
      bool full = cur + block_ > max_dim_ || cur == n_ || added == 0;
      if (!full) {
        w = av.middleCols(cur - added, added);
        continue;
      }
      // Rayleigh-Ritz on the current basis.
      Eigen::MatrixXd h = v.leftCols(cur).transpose() * (mass_.asDiagonal() * av.leftCols(cur));
      h = 0.5 * (h + h.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      if (es.info() != Eigen::Success) throw NumericalError("projected eigenproblem failed");
      Eigen::MatrixXd q = es.eigenvectors().rowwise().reverse();
      Vector theta = es.eigenvalues().reverse();
      Eigen::MatrixXd y = v.leftCols(cur) * q;
      Eigen::MatrixXd ay = av.leftCols(cur) * q;
      const Index want = std::min(nev_, cur);
      lambdas.assign(want, 0.0);
      resid.assign(want, 0.0);
      bool converged = want == nev_;
      for (Index i = 0; i < want; ++i) {
        Vector x = y.col(i);
        double xm = x.dot(mass_.cwiseProduct(x));
        lambdas[i] = x.dot(l_ * x) / xm;
        resid[i] = pair_residual(l_, mass_, l_norm_, x, lambdas[i]);
        if (resid[i] > 0.1 * opt_.tol) converged = false;
      }
      if (converged || cur == n_) {
        ritz = y.leftCols(want);
        break;
      }
      if (++restarts > opt_.max_restarts) {
        bool acceptable = want == nev_ && std::all_of(resid.begin(), resid.end(), [&](double r) { return r <= opt_.tol; });
        if (acceptable) {
          ritz = y.leftCols(want);
          break;
        }
        double worst = *std::max_element(resid.begin(), resid.end());
        throw NumericalError("shift-invert Lanczos did not converge; worst Ritz residual " + std::to_string(worst));
      }
      // Thick restart: keep the leading Ritz vectors and continue from the
      // residual directions of the least converged ones.
      Index keep = std::min(cur, nev_ + block_);
      keep = std::min(keep, max_dim_ - block_);
      Eigen::MatrixXd r = ay.leftCols(keep) - y.leftCols(keep) * theta.head(keep).asDiagonal();
      std::vector<Index> order(keep);
      std::iota(order.begin(), order.end(), 0);
      Vector rn(keep);
      for (Index i = 0; i < keep; ++i) rn[i] = std::sqrt(r.col(i).dot(mass_.cwiseProduct(r.col(i)))) / std::abs(theta[i]);
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return rn[a] > rn[b]; });
      Index nb = std::min(block_, keep);
      w.resize(n_, nb);
      for (Index i = 0; i < nb; ++i) w.col(i) = r.col(order[i]);
      v.leftCols(keep) = y.leftCols(keep);
      av.leftCols(keep) = ay.leftCols(keep);
      cur = keep;
    }
    std::vector<Index> idx(lambdas.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return lambdas[a] < lambdas[b]; });
    SpectrumResult out;
    out.path = "lanczos";
    const Index k = static_cast<Index>(idx.size());
    out.eigenvalues.resize(k);
    out.residuals.resize(k);
    Eigen::MatrixXd vecs(n_, k);
    for (Index i = 0; i < k; ++i) {
      out.eigenvalues[i] = lambdas[idx[i]];
      out.residuals[i] = resid[idx[i]];
      Vector x = ritz.col(idx[i]);
      vecs.col(i) = x / std::sqrt(x.dot(mass_.cwiseProduct(x)));
    }
    if (opt_.want_vectors) out.eigenvectors = std::move(vecs);
    return out;
  }

 private:
  void factorize() {
    double tr_l = 0.0;
    for (Index i = 0; i < n_; ++i) tr_l += l_.coeff(i, i);
    double tr_m = mass_.sum();
    sigma_ = tr_l > 0.0 ? 1e-8 * tr_l / tr_m : 1e-8;
    for (int attempt = 0; attempt < 6; ++attempt) {
      SparseOperator k = l_;
      for (Index i = 0; i < n_; ++i) k.coeffRef(i, i) += sigma_ * mass_[i];
      k.makeCompressed();
      solver_.compute(k);
      if (solver_.info() == Eigen::Success) return;
      sigma_ *= 100.0;
    }
    throw NumericalError("sparse Cholesky factorization of the shifted operator failed");
  }

  Eigen::MatrixXd random_block(Index cols) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd w(n_, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < n_; ++i) w(i, j) = normal(rng_);
    return w;
  }

  double mnorm(const Vector& x) const { return std::sqrt(std::max(0.0, x.dot(mass_.cwiseProduct(x)))); }

  // M-orthonormalizes w against the basis and itself, appends it and its
  // image under (L + sigma M)^-1 M. Returns the number of columns added.
  Index append(Eigen::MatrixXd& v, Eigen::MatrixXd& av, Index& cur, Eigen::MatrixXd w) {
    Index added = 0;
    for (int refill = 0; refill < 2 && added == 0; ++refill) {
      if (refill) w = random_block(std::min(block_, n_ - cur));
      std::vector<Vector> kept;
      for (Index j = 0; j < w.cols() && cur + static_cast<Index>(kept.size()) < std::min(max_dim_, n_); ++j) {
        Vector x = w.col(j);
        double before = mnorm(x);
        if (before == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
          if (cur > 0) {
            Vector c = v.leftCols(cur).transpose() * mass_.cwiseProduct(x);
            x -= v.leftCols(cur) * c;
          }
          for (const auto& u : kept) x -= u.dot(mass_.cwiseProduct(x)) * u;
        }
        double after = mnorm(x);
        if (after <= 1e-10 * before) continue;
        kept.push_back(x / after);
      }
      for (const auto& x : kept) v.col(cur + added++) = x;
    }
    if (added == 0) return 0;
    Eigen::MatrixXd rhs = mass_.asDiagonal() * v.middleCols(cur, added);
    Eigen::MatrixXd img = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) throw NumericalError("sparse triangular solve failed");
    av.middleCols(cur, added) = img;
    cur += added;
    return added;
  }

  const SparseOperator& l_;
  const Vector& mass_;
  Index n_;
  Index nev_;
  EigenOptions opt_;
  std::mt19937_64 rng_;
  Index block_ = 8;
  Index max_dim_ = 0;
  double l_norm_ = 0.0;
  double sigma_ = 0.0;
  Eigen::CholmodSimplicialLLT<SparseOperator> solver_;
};

}  // namespace

double whitened_norm(const SparseOperator& stiffness, const Vector& mass) {
  Vector s = mass.size() ? Vector(mass.cwiseSqrt().cwiseInverse()) : Vector::Ones(stiffness.rows());
  Vector rows = Vector::Zero(stiffness.rows());
  for (int j = 0; j < stiffness.outerSize(); ++j)
    for (SparseOperator::InnerIterator it(stiffness, j); it; ++it)
      rows[it.row()] += std::abs(it.value()) * s[it.row()] * s[it.col()];
  return rows.size() ? rows.maxCoeff() : 0.0;
}

SpectrumResult smallest_eigenpairs(const SparseOperator& stiffness, const Vector& mass, Index m,
                                   const EigenOptions& options) {
  const Index n = stiffness.rows();
  if (stiffness.cols() != n) throw ConfigError("stiffness must be square");
  if (m < 0 || m > n) throw ConfigError("requested eigenpair count exceeds system size");
  Vector s = mass.size() ? mass : Vector::Ones(n);
  if (s.size() != n) throw ConfigError("mass size does not match stiffness");
  if (n > 0 && !(s.minCoeff() > 0.0)) throw ConfigError("mass must be strictly positive");
  SpectrumResult out;
  if (m == 0) {
    out.path = "none";
    out.eigenvalues.resize(0);
    out.residuals.resize(0);
    return out;
  }
  bool dense = options.path == SolverPath::kDense || (options.path == SolverPath::kAuto && n <= options.dense_limit);
  if (dense) {
    out = dense_solve(stiffness, s, m, options);
  } else {
    BlockLanczos solver(stiffness, s, m, options);
    out = solver.run();
  }
  for (Index i = 0; i < out.residuals.size(); ++i)
    if (!(out.residuals[i] <= options.tol))
      throw NumericalError("eigenpair " + std::to_string(i) + " residual " + std::to_string(out.residuals[i]) +
                           " exceeds tolerance");
  auto kernel = kernel_dimension(out.eigenvalues, whitened_norm(stiffness, s), n);
  out.kernel_dim = kernel.dim;
  out.kernel_indeterminate = kernel.indeterminate;
  return out;
}

KernelEstimate kernel_dimension(const Vector& eigenvalues, double operator_norm, Index n) {
  KernelEstimate est;
  const Index m = eigenvalues.size();
  if (m == 0) {
    est.indeterminate = true;
    return est;
  }
  const double abs_tol = 1e-8 * operator_norm / static_cast<double>(std::max<Index>(n, 1));
  double best_ratio = 0.0;
  Index split = -1;
  for (Index i = 0; i + 1 < m; ++i) {
    double lo = std::abs(eigenvalues[i]);
    double hi = eigenvalues[i + 1];
    if (hi <= 0.0 || lo > 1e-6 * hi) continue;
    double ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (ratio > best_ratio) {
      best_ratio = ratio;
      split = i;
    }
  }
  if (split >= 0) {
    est.dim = static_cast<int>(split + 1);
    return est;
  }
  Index below = 0;
  while (below < m && std::abs(eigenvalues[below]) <= abs_tol) ++below;
  est.dim = static_cast<int>(below);
  // Every requested value is zero, or zeros blend into the spectrum.
  if (below == m || (below > 0 && eigenvalues[below] <= 1e4 * abs_tol)) est.indeterminate = true;
  return est;
}

std::vector<std::pair<double, int>> group_multiplicities(const Vector& eigenvalues, double rel_tol, double zero_tol) {
  std::vector<std::pair<double, int>> groups;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    double v = eigenvalues[i];
    if (!groups.empty()) {
      double g = groups.back().first;
      bool both_zero = std::abs(g) <= zero_tol && std::abs(v) <= zero_tol;
      if (both_zero || std::abs(v - g) <= rel_tol * std::max(std::abs(v), std::abs(g))) {
        ++groups.back().second;
        continue;
      }
    }
    groups.emplace_back(v, 1);
  }
  return groups;
}

}  // namespace biglap
