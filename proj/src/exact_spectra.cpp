#include "biglap/exact_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace biglap {

namespace {

const double kPi = std::acos(-1.0);

using Fn = std::function<double(double)>;

double bisect(const Fn& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  if (!(hi - lo <= 1e-9)) throw NumericalError("root bracket did not shrink below 1e-9");
  return 0.5 * (lo + hi);
}

// Sign-change roots of f in (x0, x1].
std::vector<double> scan_roots(const Fn& f, double x0, double x1, double step) {
  std::vector<double> roots;
  double a = x0;
  double fa = f(a);
  while (a < x1) {
    double b = std::min(a + step, x1);
    double fb = f(b);
    if (!std::isfinite(fb)) throw NumericalError("special function evaluation overflowed");
    if (fb == 0.0) {
      roots.push_back(b);
      a = b + 1e-12;
      fa = f(a);
      continue;
    }
    if (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) roots.push_back(bisect(f, a, b, fa));
    a = b;
    fa = fb;
  }
  return roots;
}

std::vector<double> first_roots(const Fn& f, double x0, int count, double step) {
  std::vector<double> roots;
  double lo = x0;
  double width = std::max(10.0, 4.0 * count);
  while (static_cast<int>(roots.size()) < count) {
    auto more = scan_roots(f, lo, lo + width, step);
    roots.insert(roots.end(), more.begin(), more.end());
    lo += width;
  }
  roots.resize(count);
  return roots;
}

double bessel_j(int n, double x) { return std::cyl_bessel_j(static_cast<double>(n), x); }

double bessel_j_prime(int n, double x) {
  if (n == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
}

double sph_j(int l, double x) { return std::sph_bessel(static_cast<unsigned>(l), x); }
double sph_y(int l, double x) { return std::sph_neumann(static_cast<unsigned>(l), x); }
double sph_j_prime(int l, double x) { return static_cast<double>(l) / x * sph_j(l, x) - sph_j(l + 1, x); }
double sph_y_prime(int l, double x) { return static_cast<double>(l) / x * sph_y(l, x) - sph_y(l + 1, x); }

void check_count(Index m) {
  if (m < 0) throw ConfigError("eigenvalue count must be non-negative");
}

// Collects eigenvalues (root/scale)^2 with multiplicity over families
// l = 0, 1, ... until the complete set below a growing bound holds m values.
// `lower(l)` bounds family l's smallest eigenvalue from below.
std::vector<double> separable_spectrum(Index m, double initial_bound, const std::function<double(int)>& lower,
                                       const std::function<std::vector<double>(int, double)>& family_roots,
                                       const std::function<int(int)>& multiplicity, double scale,
                                       bool has_zero) {
  check_count(m);
  std::vector<double> out;
  if (m == 0) return out;
  double bound = std::max(initial_bound, 1.0);
  for (int attempt = 0; attempt < 60; ++attempt, bound *= 2.0) {
    std::vector<double> vals;
    if (has_zero) vals.push_back(0.0);
    for (int l = 0; lower(l) <= bound; ++l) {
      for (double r : family_roots(l, std::sqrt(bound) * scale)) {
        double lambda = (r / scale) * (r / scale);
        if (lambda > bound) continue;
        for (int c = 0; c < multiplicity(l); ++c) vals.push_back(lambda);
      }
      if (l > 100000) throw NumericalError("separable spectrum did not terminate");
    }
    if (static_cast<Index>(vals.size()) >= m) {
      std::sort(vals.begin(), vals.end());
      vals.resize(m);
      return vals;
    }
  }
  throw NumericalError("exact spectrum enumeration exceeded its bound");
}

}  // namespace

ScalarBc parse_scalar_bc(const std::string& text) {
  if (text == "dirichlet" || text == "normal") return ScalarBc::kDirichlet;
  if (text == "neumann" || text == "tangential") return ScalarBc::kNeumann;
  throw ConfigError("unknown scalar boundary condition '" + text + "'");
}

std::vector<double> bessel_zeros(int n, int count) {
  if (n < 0) throw ConfigError("Bessel order must be non-negative");
  if (count < 1) throw ConfigError("zero count must be positive");
  // J_n has no zeros in (0, n].
  return first_roots([n](double x) { return bessel_j(n, x); }, std::max(static_cast<double>(n), 1e-3), count, 0.05);
}

std::vector<double> bessel_derivative_zeros(int n, int count) {
  if (n < 0) throw ConfigError("Bessel order must be non-negative");
  if (count < 1) throw ConfigError("zero count must be positive");
  return first_roots([n](double x) { return bessel_j_prime(n, x); }, std::max(static_cast<double>(n), 1e-3), count,
                     0.05);
}

std::vector<double> disk_spectrum(double radius, ScalarBc bc, Index m) {
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  const bool dir = bc == ScalarBc::kDirichlet;
  auto roots = [dir](int n, double xmax) {
    double x0 = std::max(static_cast<double>(n), 1e-3);
    if (x0 >= xmax) return std::vector<double>{};
    if (dir) return scan_roots([n](double x) { return bessel_j(n, x); }, x0, xmax, 0.05);
    return scan_roots([n](double x) { return bessel_j_prime(n, x); }, x0, xmax, 0.05);
  };
  return separable_spectrum(
      m, 4.0 * static_cast<double>(m) / (radius * radius) + 10.0,
      [radius](int n) { return static_cast<double>(n) * n / (radius * radius); }, roots,
      [](int n) { return n == 0 ? 1 : 2; }, radius, !dir);
}

std::vector<double> box_spectrum(const std::vector<double>& sides, ScalarBc bc, Index m) {
  check_count(m);
  if (sides.empty() || sides.size() > 3) throw ConfigError("box needs 1 to 3 side lengths");
  for (double a : sides)
    if (!(a > 0.0)) throw ConfigError("box sides must be positive");
  const int start = bc == ScalarBc::kDirichlet ? 1 : 0;
  std::vector<double> out;
  if (m == 0) return out;
  double bound = 10.0;
  for (int attempt = 0; attempt < 80; ++attempt, bound *= 2.0) {
    std::vector<double> vals;
    std::vector<int> top;
    for (double a : sides) top.push_back(static_cast<int>(std::floor(a * std::sqrt(bound) / kPi)));
    std::vector<int> idx(sides.size(), start);
    bool any = true;
    for (size_t d = 0; d < sides.size(); ++d) any = any && start <= top[d];
    while (any) {
      double lambda = 0.0;
      for (size_t d = 0; d < sides.size(); ++d) lambda += std::pow(kPi * idx[d] / sides[d], 2);
      if (lambda <= bound) vals.push_back(lambda);
      size_t d = 0;
      while (d < sides.size() && ++idx[d] > top[d]) idx[d++] = start;
      if (d == sides.size()) break;
    }
    if (static_cast<Index>(vals.size()) >= m) {
      std::sort(vals.begin(), vals.end());
      vals.resize(m);
      return vals;
    }
  }
  throw NumericalError("box spectrum enumeration exceeded its bound");
}

std::vector<double> ball_spectrum(double radius, ScalarBc bc, Index m) {
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  const bool dir = bc == ScalarBc::kDirichlet;
  auto roots = [dir](int l, double xmax) {
    double x0 = std::max(0.5 * l, 1e-3);
    if (x0 >= xmax) return std::vector<double>{};
    if (dir) return scan_roots([l](double x) { return sph_j(l, x); }, x0, xmax, 0.05);
    return scan_roots([l](double x) { return sph_j_prime(l, x); }, x0, xmax, 0.05);
  };
  double weyl = std::pow(6.0 * kPi * kPi * static_cast<double>(m) / (4.0 / 3.0 * kPi), 2.0 / 3.0) / (radius * radius);
  return separable_spectrum(
      m, weyl + 10.0, [radius](int l) { return static_cast<double>(l) * (l + 1) / (radius * radius); }, roots,
      [](int l) { return 2 * l + 1; }, radius, !dir);
}

std::vector<double> shell_spectrum(double outer, double inner, ScalarBc bc, Index m) {
  if (!(inner > 0.0 && inner < outer)) throw ConfigError("shell needs 0 < inner < outer");
  const bool dir = bc == ScalarBc::kDirichlet;
  const double a = inner;
  const double b = outer;
  const double step = 0.02 * std::min(1.0, b - a) / b;
  auto roots = [=](int l, double kmax) {
    // Roots in k; the scale below is 1, so kmax is the wavenumber bound.
    Fn f;
    if (dir)
      f = [=](double k) { return sph_j(l, k * a) * sph_y(l, k * b) - sph_j(l, k * b) * sph_y(l, k * a); };
    else
      f = [=](double k) {
        return sph_j_prime(l, k * a) * sph_y_prime(l, k * b) - sph_j_prime(l, k * b) * sph_y_prime(l, k * a);
      };
    // No eigenvalue of family l lies below l(l+1)/b^2.
    double k0 = std::max(0.999 * std::sqrt(static_cast<double>(l) * (l + 1)) / b, 1e-3 / b);
    if (k0 >= kmax) return std::vector<double>{};
    return scan_roots(f, k0, kmax, step);
  };
  double vol = 4.0 / 3.0 * kPi * (b * b * b - a * a * a);
  double weyl = std::pow(6.0 * kPi * kPi * static_cast<double>(m) / vol, 2.0 / 3.0);
  return separable_spectrum(
      m, weyl + 10.0, [b](int l) { return static_cast<double>(l) * (l + 1) / (b * b); }, roots,
      [](int l) { return 2 * l + 1; }, 1.0, !dir);
}

}  // namespace biglap
