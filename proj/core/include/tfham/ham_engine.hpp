#pragma once

// Homotopy-analysis recursion for the Thomas-Fermi problem
//
//   N(u) = x u''^2 - u^3 = 0,  u(0) = 1, u(inf) = 0,
//
// in the basis t^(-e), t = alpha + beta*x. With the auxiliary operator
//
//   L = t/(gamma+1) d^2/dx^2 + beta d/dx,   L t^(-e) = lambda(e) t^(-(e+1)),
//   lambda(e) = beta^2 e (e - gamma) / (gamma + 1),
//
// each order solves L(u_k) = L(u_{k-1}) + h R_k with u_k(0) = u_k(inf) = 0,
// where R_k = x sum_{i+j=k-1} u_i'' u_j'' - sum_{i+j+l=k-1} u_i u_j u_l.
// The kernel of L is spanned by {1, t^(-gamma)}; the constant is ruled out by
// decay at infinity and the t^(-gamma) multiple fixes u_k(0) = 0.

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfham/basis_series.hpp"

namespace tfham {

/// KernelConsistent uses the (gamma+1) denominator for which t^(-gamma) is in
/// the kernel. AsPrinted uses the (alpha+gamma) denominator; its kernel is
/// t^(-(alpha+gamma-1)), so for alpha != 1 the recursion no longer satisfies
/// the deformation identity. It exists only to demonstrate that failure.
enum class OperatorForm { KernelConsistent, AsPrinted };

struct HamConfig {
  BasisParams basis;
  Rational h{-1, 2};
  int order = 10;
  NumericMode mode = NumericMode::approx(512);
  OperatorForm op = OperatorForm::KernelConsistent;

  /// Throws ConfigError: basis params positive, h < 0, order >= 0,
  /// Approx precision >= 64, Exact mode only with rational powers of alpha.
  void validate() const;
};

struct OrderDiagnostics {
  int k = 0;
  std::size_t term_count = 0;
  Rational max_exponent{0};
  /// Smallest exponent of R_k (k >= 1); zero for k = 0.
  Rational min_forcing_exponent{0};
  /// Exact: L(u_k) - L(u_{k-1}) - h R_k is the zero series.
  /// Approx: its largest coefficient is below 2^(32 - precision) relative to h R_k.
  bool residual_verified = true;
  /// log2 of the largest |c_e alpha^(-e)|, i.e. the dynamic range the value
  /// at x = 0 is cancelled out of. Approximately bits lost in Approx mode.
  double magnitude_bits = 0;
  double seconds = 0;
};

template <class C>
struct DeformationSequence {
  HamConfig config;
  std::vector<BasisSeries<C>> orders;
  std::vector<C> slope_per_order;
  std::vector<C> curvature_per_order;
  std::vector<OrderDiagnostics> diagnostics;

  int order() const noexcept { return static_cast<int>(orders.size()) - 1; }
  /// Sum of u_k'(0) for k = 0..upto.
  C partial_slope(int upto) const;
  C partial_curvature(int upto) const;
  /// true when some order's magnitude_bits leaves fewer than 32 bits of the
  /// configured precision.
  bool precision_exhausted() const;
};

using ExactSequence = DeformationSequence<Rational>;
using ApproxSequence = DeformationSequence<Real>;

/// lambda(e) for the chosen operator form.
Rational operator_eigenvalue(const Rational& e, const BasisParams& p, OperatorForm form = OperatorForm::KernelConsistent);

/// Exponent spanning the non-constant kernel direction of L.
Rational kernel_exponent(const BasisParams& p, OperatorForm form = OperatorForm::KernelConsistent);

/// u_0 = alpha t^(-gamma).
template <class C>
BasisSeries<C> initial_guess(const BasisParams& basis, const NumericMode& mode);

template <class C>
BasisSeries<C> apply_L(const BasisSeries<C>& s, OperatorForm form = OperatorForm::KernelConsistent);

/// Termwise inverse of apply_L. Throws ResonanceError (carrying the preimage
/// exponent) when a preimage falls in the kernel, BasisEscapeError for e < 1.
template <class C>
BasisSeries<C> invert_L(const BasisSeries<C>& f, OperatorForm form = OperatorForm::KernelConsistent);

template <class C>
BasisSeries<C> compute_Rk(const DeformationSequence<C>& seq, int k);

/// u_k from u_0..u_{k-1}; seq may hold more orders, only the first k are read.
template <class C>
BasisSeries<C> solve_order(const DeformationSequence<C>& seq, int k);

/// Throws EngineError with the failing order on resonance or basis escape.
template <class C>
DeformationSequence<C> run(const HamConfig& config);

template <class C>
BasisSeries<C> partial_sum(const DeformationSequence<C>& seq, int upto);

template <class C>
BasisSeries<C> order_residual(const DeformationSequence<C>& seq, int k);

/// Signed residual u'' - sqrt(u^3/x) of the original equation on the convex
/// (physical) branch. Throws DomainError for x <= 0 and BranchError if u <= 0.
template <class C>
std::vector<Real> original_residual(const BasisSeries<C>& s, const std::vector<Real>& grid);

struct RunSummaryOptions {
  bool include_timings = false;
};

template <class C>
nlohmann::json run_summary(const DeformationSequence<C>& seq, const RunSummaryOptions& opts = {});

nlohmann::json to_json(const HamConfig& config);

} // namespace tfham
