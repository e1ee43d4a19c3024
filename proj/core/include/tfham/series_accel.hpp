#pragma once

// Diagonal Pade acceleration of the order-by-order slope contributions
// a_k = u_k'(0). Two independent routes evaluate the [m/m] approximant of
// sum a_k p^k at p = 1: a direct solve of the denominator system and Wynn's
// epsilon table over the partial sums.

#include <optional>
#include <string>
#include <vector>

#include "tfham/ham_engine.hpp"
#include "tfham/number.hpp"

namespace tfham {

template <class C>
struct CoefficientTail {
  /// a_0..a_M, each an order-k contribution (not a partial sum).
  std::vector<C> coefficients;

  std::size_t size() const noexcept { return coefficients.size(); }
  std::vector<C> partial_sums() const;

  static CoefficientTail from_sequence(const DeformationSequence<C>& seq) { return {seq.slope_per_order}; }
};

enum class PadeMethod { DirectSolve, Epsilon };

std::string to_string(PadeMethod m);

template <class C>
struct PadeResult {
  int m = 0;
  C value;
  PadeMethod method = PadeMethod::DirectSolve;
};

/// [m/m] approximant at p = 1 from the linear system for the denominator.
/// Needs 2m+1 coefficients (RangeError). Singular systems and a vanishing
/// denominator at p = 1 raise DegeneracyError; nothing is regularized.
template <class C>
PadeResult<C> pade_at_one(const CoefficientTail<C>& tail, int m);

/// Epsilon table over partial sums S_0..S_n. column(k)[j] is eps_k^(j);
/// even columns 2m hold the [j+m/m] Pade values at p = 1.
template <class C>
class EpsilonTable {
public:
  std::size_t columns() const noexcept { return columns_.size(); }
  /// std::nullopt marks an entry lost to a zero difference or an indeterminate
  /// inf - inf form; the latter spreads to every entry that depends on it.
  const std::vector<std::optional<C>>& column(std::size_t k) const { return columns_.at(k); }
  /// eps_{2m}^(0), the diagonal [m/m] value.
  std::optional<C> diagonal(int m) const;

private:
  template <class D>
  friend EpsilonTable<D> wynn_epsilon(const std::vector<D>& partial_sums);
  std::vector<std::vector<std::optional<C>>> columns_;
};

/// Needs at least three partial sums (RangeError).
template <class C>
EpsilonTable<C> wynn_epsilon(const std::vector<C>& partial_sums);

/// [m/m] at p = 1 through the epsilon table; DegeneracyError when the entry is
/// unavailable.
template <class C>
PadeResult<C> pade_by_epsilon(const CoefficientTail<C>& tail, int m);

/// Both routes, with the field's primary first: DirectSolve for exact tails,
/// Epsilon for approximate ones. relative_gap is |primary - check| / |primary|,
/// absent when the check route is degenerate.
template <class C>
struct AcceleratedValue {
  PadeResult<C> primary;
  std::optional<PadeResult<C>> check;
  std::optional<double> relative_gap;
};

template <class C>
AcceleratedValue<C> accelerate(const CoefficientTail<C>& tail, int m);

/// 100 |value - reference| / |reference|. DomainError for a zero reference.
double error_percent(double value, double reference);
Real error_percent(const Real& value, const Real& reference);

} // namespace tfham
