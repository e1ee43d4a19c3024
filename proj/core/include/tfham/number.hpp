#pragma once

// Coefficient fields: exact rationals (GMP) and fixed-precision binary
// floating point (MPFR), plus the NumericMode that selects between them.

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

namespace tfham {

using Rational = mpq_class;

/// Parses an integer, a fraction "p/q" or a finite decimal ("-0.75", "1e-3")
/// into a canonical Rational. Throws ParseError or DivisionByZeroError.
Rational parse_number(std::string_view text);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& q);

/// base^e when the result is rational, std::nullopt otherwise.
/// base must be positive.
std::optional<Rational> exact_pow(const Rational& base, const Rational& e);

/// MPFR number with an explicit mantissa precision. Binary operations round
/// to the larger precision of the two operands.
class Real {
public:
  static constexpr int kDefaultPrecision = 64;

  explicit Real(int precision = kDefaultPrecision);
  Real(double value, int precision);
  Real(long value, int precision);
  Real(int value, int precision) : Real(static_cast<long>(value), precision) {}
  Real(const Rational& value, int precision);
  Real(long double value, int precision);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  /// Decimal or any MPFR-readable text, rounded to nearest.
  static Real from_string(std::string_view text, int precision);

  int precision() const noexcept { return static_cast<int>(mpfr_get_prec(value_)); }
  int sign() const noexcept { return mpfr_sgn(value_); }
  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }

  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  long double to_long_double() const noexcept { return mpfr_get_ld(value_, MPFR_RNDN); }

  /// log2|x|; -inf for zero.
  double log2_abs() const;

  /// Decimal rendering. digits == 0 selects the full precision of the value.
  std::string to_string(int digits = 0) const;

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);

  /// *this += a * b with a single rounding.
  Real& add_product(const Real& a, const Real& b);

  Real operator-() const;

  friend Real operator+(Real lhs, const Real& rhs) { return lhs += rhs; }
  friend Real operator-(Real lhs, const Real& rhs) { return lhs -= rhs; }
  friend Real operator*(Real lhs, const Real& rhs) { return lhs *= rhs; }
  friend Real operator/(Real lhs, const Real& rhs) { return lhs /= rhs; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

  friend Real abs(const Real& x);
  friend Real sqrt(const Real& x);
  /// x^e for x > 0 and rational e.
  friend Real pow(const Real& x, const Rational& e);
  friend Real ldexp(const Real& x, long exp);

  mpfr_srcptr get() const noexcept { return value_; }
  mpfr_ptr get() noexcept { return value_; }

private:
  void widen_to(int precision);
  mpfr_t value_;
};

struct NumericMode {
  enum class Kind { Exact, Approx };

  Kind kind = Kind::Approx;
  int precision = 512;

  static NumericMode exact() { return {Kind::Exact, 0}; }
  static NumericMode approx(int bits) { return {Kind::Approx, bits}; }

  bool is_exact() const noexcept { return kind == Kind::Exact; }
  friend bool operator==(const NumericMode&, const NumericMode&) = default;
};

std::string to_string(const NumericMode& mode);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real pow(const Real& x, const Rational& e);
Real ldexp(const Real& x, long exp);

/// Per-field hooks used by the generic series and acceleration code.
template <class C>
struct Field;

template <>
struct Field<Rational> {
  static constexpr bool exact = true;
  static Rational make(const Rational& q, const NumericMode&) { return q; }
  static Rational zero(const NumericMode&) { return Rational(0); }
  static bool negligible(const Rational& c, const NumericMode&) { return sgn(c) == 0; }
  static void add_product(Rational& acc, const Rational& a, const Rational& b) { acc += a * b; }
  static Rational abs(const Rational& c) { return ::abs(c); }
  static Real to_real(const Rational& c, int precision) { return Real(c, precision); }
  static std::string render(const Rational& c) { return to_string(c); }
  /// Throws DomainError when base^e is irrational.
  static Rational pow(const Rational& base, const Rational& e, const NumericMode&);
};

template <>
struct Field<Real> {
  static constexpr bool exact = false;
  static Real make(const Rational& q, const NumericMode& mode) { return Real(q, mode.precision); }
  static Real zero(const NumericMode& mode) { return Real(mode.precision); }
  /// |c| < 2^(-precision+16).
  static bool negligible(const Real& c, const NumericMode& mode);
  static void add_product(Real& acc, const Real& a, const Real& b) { acc.add_product(a, b); }
  static Real abs(const Real& c) { return tfham::abs(c); }
  static Real to_real(const Real& c, int precision);
  static std::string render(const Real& c) { return c.to_string(); }
  static Real pow(const Rational& base, const Rational& e, const NumericMode& mode);
};

} // namespace tfham
