#pragma once

#include "biglap/common.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace biglap {

enum class SolverPath { kAuto, kDense, kIterative };

struct EigenOptions {
  double tol = 1e-9;  // bound on ||Lx - lambda Sx|| / (||L||_inf ||x||)
  SolverPath path = SolverPath::kAuto;
  Index dense_limit = 2000;
  int block_size = 8;
  int max_restarts = 400;
  std::uint64_t seed = 0x5eedb16ULL;
  bool want_vectors = true;
};

struct SpectrumResult {
  Vector eigenvalues;            // ascending
  Eigen::MatrixXd eigenvectors;  // columns, S-normalized (empty unless requested)
  Vector residuals;              // relative residual per pair
  int kernel_dim = 0;
  bool kernel_indeterminate = false;
  std::string path;
};

/// m smallest eigenpairs of L x = lambda S x, S diagonal positive (pass an
/// empty vector for S = I). Dense whitened solve for small systems,
/// shift-invert block Lanczos otherwise.
SpectrumResult smallest_eigenpairs(const SparseOperator& stiffness, const Vector& mass, Index m,
                                   const EigenOptions& options = {});

struct KernelEstimate {
  int dim = 0;
  bool indeterminate = false;
};

/// Number of (numerically) zero eigenvalues among an ascending list.
/// `operator_norm` is the infinity norm of S^-1/2 L S^-1/2 and `n` the
/// system size; both feed the fallback absolute threshold.
KernelEstimate kernel_dimension(const Vector& eigenvalues, double operator_norm, Index n);

/// ||S^-1/2 L S^-1/2||_inf.
double whitened_norm(const SparseOperator& stiffness, const Vector& mass);

/// Consecutive eigenvalues within `rel_tol` (relative) merged into
/// (value, multiplicity) groups; values below `zero_tol` in magnitude are
/// grouped together as zeros.
std::vector<std::pair<double, int>> group_multiplicities(const Vector& eigenvalues, double rel_tol = 1e-6,
                                                         double zero_tol = 0.0);

}  // namespace biglap
