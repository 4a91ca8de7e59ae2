#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace biglap {

using Index = std::int64_t;
using Point = Eigen::Vector3d;
using Vector = Eigen::VectorXd;

/// Real sparse matrix used for every incidence, projection and Laplacian
/// operator in the library.
using SparseOperator = Eigen::SparseMatrix<double>;

/// Boundary condition of a form: normal (Dirichlet-type) or tangential
/// (Neumann-type).
enum class Bc { kNormal, kTangential };

enum class LaplacianKind { kBig, kHodge, kCombinatorial };

/// Base of all library errors. The subclasses map onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Factorization failure, non-convergence, inconsistent spectra.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

std::string to_string(Bc bc);
std::string to_string(LaplacianKind kind);
Bc parse_bc(const std::string& text);
LaplacianKind parse_kind(const std::string& text);

}  // namespace biglap
