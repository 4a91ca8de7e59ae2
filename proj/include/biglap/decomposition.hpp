#pragma once

#include "biglap/laplacian.hpp"

#include <string>

namespace biglap {

/// Cochain values per included k-cell, in mask order.
struct DiscreteForm {
  int k = 0;
  Vector values;
};

/// Coboundaries and diagonal stars used by the decomposition. Identity stars
/// give the combinatorial decomposition.
struct DecompositionContext {
  Bc bc = Bc::kNormal;
  SparseOperator d0;  // 0-forms -> 1-forms
  SparseOperator d1;  // 1-forms -> 2-forms
  Vector s0, s1, s2;

  Index size(int k) const;
  void validate() const;

  /// Uses the complex's stars; the complex must have been built with them.
  static DecompositionContext from_complex(const RestrictedComplex& complex);
  /// Same coboundaries, all stars equal to one.
  static DecompositionContext identity(const RestrictedComplex& complex);
};

struct Decomposition {
  DiscreteForm exact;     // d0 alpha
  DiscreteForm coexact;   // S1^-1 d1^T gamma
  DiscreteForm harmonic;  // remainder
  int exact_iterations = 0;
  int coexact_iterations = 0;
};

/// Exact part first, coexact from the remainder, harmonic last. Both Poisson
/// solves run preconditioned conjugate gradients to relative residual `tol`.
Decomposition decompose(const DiscreteForm& form, const DecompositionContext& ctx, double tol = 1e-10);

DiscreteForm discrete_curl(const DiscreteForm& form, const DecompositionContext& ctx);
DiscreteForm discrete_div(const DiscreteForm& form, const DecompositionContext& ctx);

/// a^T S1 b.
double s_inner(const DecompositionContext& ctx, const Vector& a, const Vector& b);
double s_norm(const DecompositionContext& ctx, const Vector& a);

struct DecompositionReport {
  double input_norm = 0.0;
  double exact_fraction = 0.0;     // |exact|_S / |input|_S
  double coexact_fraction = 0.0;
  double harmonic_fraction = 0.0;
  double reconstruction = 0.0;     // |input - sum| / |input| (Euclidean)
  double orthogonality = 0.0;      // max pairwise |<a,b>_S| / |input|_S^2
  double exact_curl = 0.0;         // |d1 exact| / (|d1|_inf |input|)
  double coexact_div = 0.0;        // |d0^T S1 coexact| / (|d0|_inf |S1 input|)
};

/// Norms are measured with the stars of `metric`, which may differ from the
/// context the decomposition was computed in.
DecompositionReport report(const DiscreteForm& input, const Decomposition& dec, const DecompositionContext& metric);

/// Moves values between two masks of the same grid and degree; cells missing
/// from `to` must carry zero (else ConfigError), new cells get zero.
DiscreteForm transfer_form(const DiscreteForm& form, const InclusionMask& from, const InclusionMask& to);

/// Primal edge form (values on `primal` edges of `grid`) carried over to the
/// 1-forms of a tangential complex built from the same grid, whose 1-cells
/// are the dual faces pierced by primal edges. Orientation follows the
/// tangential coboundary so that d0 commutes with the map. Edges without a
/// tangential counterpart must carry zero.
DiscreteForm primal_edges_to_tangential(const DiscreteForm& form, const GridComplex& grid, const InclusionMask& primal,
                                        const RestrictedComplex& tangential);

/// Text format: "FORM <k> <n>" then one value per line.
void save_form(const DiscreteForm& form, const std::string& path);
DiscreteForm load_form(const std::string& path);

}  // namespace biglap
