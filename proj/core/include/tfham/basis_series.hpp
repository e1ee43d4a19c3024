#pragma once

// Finite series over the decaying basis t^(-e), t = alpha + beta*x, with
// rational exponents e >= 0 and coefficients in an exact or fixed-precision
// field. Series values are immutable; every operation returns a new series.

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfham/number.hpp"

namespace tfham {

struct BasisParams {
  Rational alpha{1};
  Rational beta{1};
  Rational gamma{1};

  /// Throws ConfigError unless all three are strictly positive.
  void validate() const;

  friend bool operator==(const BasisParams&, const BasisParams&) = default;
};

template <class C>
struct Term {
  Rational exponent;
  C coeff;
};

/// Sum of coeff * (alpha + beta*x)^(-exponent). Terms are kept sorted by
/// ascending exponent with no zero (or negligible, in Approx mode) coefficients.
template <class C>
class BasisSeries {
public:
  using coefficient_type = C;
  using term_type = Term<C>;

  BasisSeries(BasisParams params, NumericMode mode);

  /// Sorts, merges equal exponents and drops zeros. Throws BasisEscapeError on
  /// a negative exponent.
  static BasisSeries from_terms(BasisParams params, NumericMode mode, std::vector<term_type> terms);

  static BasisSeries constant(BasisParams params, NumericMode mode, const C& value);
  static BasisSeries monomial(BasisParams params, NumericMode mode, const Rational& exponent, const C& coeff);

  const BasisParams& params() const noexcept { return params_; }
  const NumericMode& mode() const noexcept { return mode_; }
  std::span<const term_type> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Coefficient of t^(-e); zero when absent.
  C coefficient(const Rational& e) const;
  /// Throws RangeError on the zero series.
  const Rational& min_exponent() const;
  const Rational& max_exponent() const;

  /// Every operation rejects operands built over different parameters or modes.
  void require_compatible(const BasisSeries& other) const;

private:
  BasisParams params_;
  NumericMode mode_;
  std::vector<term_type> terms_;
};

using ExactSeries = BasisSeries<Rational>;
using ApproxSeries = BasisSeries<Real>;

template <class C>
BasisSeries<C> series_add(const BasisSeries<C>& a, const BasisSeries<C>& b);
template <class C>
BasisSeries<C> series_sub(const BasisSeries<C>& a, const BasisSeries<C>& b);
template <class C>
BasisSeries<C> series_scale(const BasisSeries<C>& a, const C& factor);
template <class C>
BasisSeries<C> series_mul(const BasisSeries<C>& a, const BasisSeries<C>& b);

/// Multiplies by x = (t - alpha)/beta. Every exponent of a must be >= 1.
template <class C>
BasisSeries<C> series_mul_by_x(const BasisSeries<C>& a);

/// Second derivative in x: c t^(-e) -> c e (e+1) beta^2 t^(-(e+2)).
template <class C>
BasisSeries<C> series_d2(const BasisSeries<C>& a);

/// First derivative in x: c t^(-e) -> -c e beta t^(-(e+1)).
template <class C>
BasisSeries<C> series_d1(const BasisSeries<C>& a);

/// Value at x = 0, exact in Exact mode.
template <class C>
C value_at_zero(const BasisSeries<C>& a);

/// u'(0) (order 1) or u''(0) (order 2). Throws RangeError for other orders.
template <class C>
C deriv_at_zero(const BasisSeries<C>& a, int order);

/// Numeric value at x >= 0, rounded to mode.precision (Exact series are
/// converted first). Throws DomainError for negative x.
template <class C>
Real series_eval(const BasisSeries<C>& a, const Real& x, const NumericMode& mode);

/// Exact value at a rational x >= 0; requires every power of alpha + beta*x
/// to be rational.
Rational evaluate_exact(const ExactSeries& a, const Rational& x);

/// Rounds every coefficient to the given precision.
ApproxSeries to_approx(const ExactSeries& a, int precision);

template <class C>
BasisSeries<C> operator+(const BasisSeries<C>& a, const BasisSeries<C>& b) { return series_add(a, b); }
template <class C>
BasisSeries<C> operator-(const BasisSeries<C>& a, const BasisSeries<C>& b) { return series_sub(a, b); }
template <class C>
BasisSeries<C> operator*(const BasisSeries<C>& a, const BasisSeries<C>& b) { return series_mul(a, b); }

/// {"alpha":"3/4","beta":"1","gamma":"1","terms":[{"e":"1","c":"3/4"},...]}
template <class C>
nlohmann::json to_json(const BasisSeries<C>& s);

ExactSeries exact_series_from_json(const nlohmann::json& j);
ApproxSeries approx_series_from_json(const nlohmann::json& j, int precision);

} // namespace tfham
