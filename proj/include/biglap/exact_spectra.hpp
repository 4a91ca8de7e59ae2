#pragma once

#include "biglap/common.hpp"

#include <vector>

namespace biglap {

enum class ScalarBc { kDirichlet, kNeumann };

ScalarBc parse_scalar_bc(const std::string& text);

/// First `count` positive zeros of the Bessel function J_n.
std::vector<double> bessel_zeros(int n, int count);

/// First `count` positive zeros of J_n' (the zero at the origin for n = 0 is
/// skipped).
std::vector<double> bessel_derivative_zeros(int n, int count);

/// The m smallest eigenvalues of the scalar Laplacian (-Delta) on each shape,
/// ascending, with multiplicity.
std::vector<double> disk_spectrum(double radius, ScalarBc bc, Index m);
std::vector<double> box_spectrum(const std::vector<double>& sides, ScalarBc bc, Index m);
std::vector<double> ball_spectrum(double radius, ScalarBc bc, Index m);
std::vector<double> shell_spectrum(double outer, double inner, ScalarBc bc, Index m);

}  // namespace biglap
