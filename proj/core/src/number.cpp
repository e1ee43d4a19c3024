#include "tfham/number.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>

#include "tfham/errors.hpp"

namespace tfham {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ParseError("malformed number: '" + std::string(whole) + "'");
  mpz_class z(std::string(s), 10);
  return negative ? mpz_class(-z) : z;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    auto exp_text = s.substr(epos + 1);
    mpz_class e = parse_integer(exp_text, whole);
    if (!e.fits_slong_p() || abs(e) > 100000)
      throw ParseError("exponent out of range: '" + std::string(whole) + "'");
    exponent = e.get_si();
    s = s.substr(0, epos);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot);
    auto fp = s.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw ParseError("malformed number: '" + std::string(whole) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!all_digits(s)) throw ParseError("malformed number: '" + std::string(whole) + "'");
    digits = std::string(s);
  }
  Rational q{mpz_class(digits, 10)};
  long shift = exponent - frac_digits;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift < 0)
    q /= Rational(scale);
  else
    q *= Rational(scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Exact integer k-th root, if one exists.
std::optional<mpz_class> exact_root(const mpz_class& z, unsigned long k) {
  if (k == 1) return z;
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), z.get_mpz_t(), k) == 0) return std::nullopt;
  return r;
}

} // namespace

Rational parse_number(std::string_view text) {
  auto s = trim(text);
  if (s.empty()) throw ParseError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(trim(s.substr(0, slash)), text);
    mpz_class den = parse_integer(trim(s.substr(slash + 1)), text);
    if (den == 0) throw DivisionByZeroError("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  return parse_decimal(s, text);
}

std::string to_string(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::optional<Rational> exact_pow(const Rational& base, const Rational& e) {
  if (sgn(base) <= 0) throw DomainError("exact_pow requires a positive base");
  const mpz_class& den = e.get_den();
  if (!den.fits_ulong_p()) return std::nullopt;
  auto k = den.get_ui();
  auto rn = exact_root(base.get_num(), k);
  auto rd = exact_root(base.get_den(), k);
  if (!rn || !rd) return std::nullopt;
  const mpz_class& n = e.get_num();
  if (!n.fits_slong_p()) return std::nullopt;
  long p = n.get_si();
  unsigned long ap = static_cast<unsigned long>(p < 0 ? -p : p);
  mpz_class num, dn;
  mpz_pow_ui(num.get_mpz_t(), rn->get_mpz_t(), ap);
  mpz_pow_ui(dn.get_mpz_t(), rd->get_mpz_t(), ap);
  Rational r = p < 0 ? Rational(dn, num) : Rational(num, dn);
  r.canonicalize();
  return r;
}

// --- Real ---

Real::Real(int precision) {
  mpfr_init2(value_, precision);
  mpfr_set_zero(value_, 1);
}

Real::Real(double value, int precision) {
  mpfr_init2(value_, precision);
  mpfr_set_d(value_, value, MPFR_RNDN);
}

Real::Real(long value, int precision) {
  mpfr_init2(value_, precision);
  mpfr_set_si(value_, value, MPFR_RNDN);
}

Real::Real(long double value, int precision) {
  mpfr_init2(value_, precision);
  mpfr_set_ld(value_, value, MPFR_RNDN);
}

Real::Real(const Rational& value, int precision) {
  mpfr_init2(value_, precision);
  mpfr_set_q(value_, value.get_mpq_t(), MPFR_RNDN);
}

Real::Real(const Real& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real Real::from_string(std::string_view text, int precision) {
  Real r(precision);
  std::string s(trim(text));
  if (s.empty()) throw ParseError("empty real");
  char* end = nullptr;
  mpfr_strtofr(r.value_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end != s.c_str() + s.size()) throw ParseError("malformed real: '" + std::string(text) + "'");
  return r;
}

double Real::log2_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  long e = 0;
  double m = mpfr_get_d_2exp(&e, value_, MPFR_RNDN);
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(value_)) return "nan";
  if (mpfr_inf_p(value_)) return sign() < 0 ? "-inf" : "inf";
  if (digits <= 0) digits = static_cast<int>(std::floor(precision() * 0.30102999566398120));
  if (digits < 1) digits = 1;
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, value_);
  std::unique_ptr<char, void (*)(char*)> guard(buf, [](char* p) { mpfr_free_str(p); });
  return std::string(buf);
}

void Real::widen_to(int precision) {
  if (precision > this->precision()) mpfr_prec_round(value_, precision, MPFR_RNDN);
}

Real& Real::operator+=(const Real& rhs) {
  widen_to(rhs.precision());
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(const Real& rhs) {
  widen_to(rhs.precision());
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& rhs) {
  widen_to(rhs.precision());
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(const Real& rhs) {
  widen_to(rhs.precision());
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

Real& Real::add_product(const Real& a, const Real& b) {
  widen_to(std::max(a.precision(), b.precision()));
  mpfr_fma(value_, a.value_, b.value_, value_, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.value_, r.value_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

Real abs(const Real& x) {
  Real r(x);
  mpfr_abs(r.value_, r.value_, MPFR_RNDN);
  return r;
}

Real sqrt(const Real& x) {
  Real r(x.precision());
  mpfr_sqrt(r.value_, x.value_, MPFR_RNDN);
  return r;
}

Real pow(const Real& x, const Rational& e) {
  Real r(x.precision());
  if (e.get_den() == 1 && e.get_num().fits_slong_p()) {
    mpfr_pow_si(r.value_, x.value_, e.get_num().get_si(), MPFR_RNDN);
  } else {
    Real ex(e, x.precision() + 32);
    mpfr_pow(r.value_, x.value_, ex.value_, MPFR_RNDN);
  }
  return r;
}

Real ldexp(const Real& x, long exp) {
  Real r(x);
  mpfr_mul_2si(r.value_, r.value_, exp, MPFR_RNDN);
  return r;
}

std::string to_string(const NumericMode& mode) {
  return mode.is_exact() ? "exact" : "float:" + std::to_string(mode.precision);
}

// --- field hooks ---

Rational Field<Rational>::pow(const Rational& base, const Rational& e, const NumericMode&) {
  auto r = exact_pow(base, e);
  if (!r)
    throw DomainError("(" + to_string(base) + ")^(" + to_string(e) +
                      ") is irrational; exact mode needs rational powers of alpha + beta*x");
  return *r;
}

bool Field<Real>::negligible(const Real& c, const NumericMode& mode) {
  if (c.is_zero()) return true;
  // 2^(e-1) <= |c| < 2^e
  long e = mpfr_get_exp(c.get());
  return e <= -static_cast<long>(mode.precision) + 16;
}

Real Field<Real>::to_real(const Real& c, int precision) {
  Real r(precision);
  mpfr_set(r.get(), c.get(), MPFR_RNDN);
  return r;
}

Real Field<Real>::pow(const Rational& base, const Rational& e, const NumericMode& mode) {
  return tfham::pow(Real(base, mode.precision), e);
}

} // namespace tfham
