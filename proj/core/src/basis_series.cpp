#include "tfham/basis_series.hpp"

#include <algorithm>

#include "tfham/errors.hpp"

namespace tfham {

void BasisParams::validate() const {
  if (sgn(alpha) <= 0) throw ConfigError("alpha must be positive, got " + to_string(alpha));
  if (sgn(beta) <= 0) throw ConfigError("beta must be positive, got " + to_string(beta));
  if (sgn(gamma) <= 0) throw ConfigError("gamma must be positive, got " + to_string(gamma));
}

namespace {

template <class C>
bool mode_admits(const NumericMode& mode) {
  return mode.is_exact() == Field<C>::exact;
}

// Exponents of both operands on a common integer lattice e = n / scale.
struct Lattice {
  mpz_class scale{1};

  void include(const Rational& e) { mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), e.get_den().get_mpz_t()); }

  long index(const Rational& e) const {
    mpz_class n = e.get_num() * (scale / e.get_den());
    if (!n.fits_slong_p()) throw RangeError("exponent lattice index overflow");
    return n.get_si();
  }

  Rational exponent(long n) const {
    Rational e(mpz_class(n), scale);
    e.canonicalize();
    return e;
  }
};

} // namespace

template <class C>
BasisSeries<C>::BasisSeries(BasisParams params, NumericMode mode) : params_(std::move(params)), mode_(mode) {
  if (!mode_admits<C>(mode_))
    throw ParameterMismatchError("coefficient field does not match numeric mode " + to_string(mode_));
}

template <class C>
BasisSeries<C> BasisSeries<C>::from_terms(BasisParams params, NumericMode mode, std::vector<term_type> terms) {
  BasisSeries s(std::move(params), mode);
  for (const auto& t : terms)
    if (sgn(t.exponent) < 0)
      throw BasisEscapeError("negative exponent " + to_string(t.exponent) + " leaves the decaying basis");
  std::stable_sort(terms.begin(), terms.end(),
                   [](const term_type& a, const term_type& b) { return a.exponent < b.exponent; });
  for (auto& t : terms) {
    if (!s.terms_.empty() && s.terms_.back().exponent == t.exponent)
      s.terms_.back().coeff += t.coeff;
    else
      s.terms_.push_back(std::move(t));
  }
  std::erase_if(s.terms_, [&](const term_type& t) { return Field<C>::negligible(t.coeff, s.mode_); });
  return s;
}

template <class C>
BasisSeries<C> BasisSeries<C>::constant(BasisParams params, NumericMode mode, const C& value) {
  return from_terms(std::move(params), mode, {term_type{Rational(0), value}});
}

template <class C>
BasisSeries<C> BasisSeries<C>::monomial(BasisParams params, NumericMode mode, const Rational& exponent,
                                        const C& coeff) {
  return from_terms(std::move(params), mode, {term_type{exponent, coeff}});
}

template <class C>
C BasisSeries<C>::coefficient(const Rational& e) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                             [](const term_type& t, const Rational& x) { return t.exponent < x; });
  if (it != terms_.end() && it->exponent == e) return it->coeff;
  return Field<C>::zero(mode_);
}

template <class C>
const Rational& BasisSeries<C>::min_exponent() const {
  if (terms_.empty()) throw RangeError("zero series has no exponents");
  return terms_.front().exponent;
}

template <class C>
const Rational& BasisSeries<C>::max_exponent() const {
  if (terms_.empty()) throw RangeError("zero series has no exponents");
  return terms_.back().exponent;
}

template <class C>
void BasisSeries<C>::require_compatible(const BasisSeries& other) const {
  if (!(params_ == other.params_)) throw ParameterMismatchError("series built over different basis parameters");
  if (!(mode_ == other.mode_)) throw ParameterMismatchError("series built in different numeric modes");
}

template <class C>
BasisSeries<C> series_add(const BasisSeries<C>& a, const BasisSeries<C>& b) {
  a.require_compatible(b);
  std::vector<Term<C>> out;
  out.reserve(a.size() + b.size());
  auto ia = a.terms().begin(), ib = b.terms().begin();
  while (ia != a.terms().end() || ib != b.terms().end()) {
    if (ib == b.terms().end() || (ia != a.terms().end() && ia->exponent < ib->exponent)) {
      out.push_back(*ia++);
    } else if (ia == a.terms().end() || ib->exponent < ia->exponent) {
      out.push_back(*ib++);
    } else {
      out.push_back({ia->exponent, ia->coeff + ib->coeff});
      ++ia;
      ++ib;
    }
  }
  return BasisSeries<C>::from_terms(a.params(), a.mode(), std::move(out));
}

template <class C>
BasisSeries<C> series_scale(const BasisSeries<C>& a, const C& factor) {
  std::vector<Term<C>> out;
  out.reserve(a.size());
  for (const auto& t : a.terms()) out.push_back({t.exponent, t.coeff * factor});
  return BasisSeries<C>::from_terms(a.params(), a.mode(), std::move(out));
}

template <class C>
BasisSeries<C> series_sub(const BasisSeries<C>& a, const BasisSeries<C>& b) {
  return series_add(a, series_scale(b, Field<C>::make(Rational(-1), b.mode())));
}

template <class C>
BasisSeries<C> series_mul(const BasisSeries<C>& a, const BasisSeries<C>& b) {
  a.require_compatible(b);
  if (a.is_zero() || b.is_zero()) return BasisSeries<C>(a.params(), a.mode());
  Lattice lattice;
  for (const auto& t : a.terms()) lattice.include(t.exponent);
  for (const auto& t : b.terms()) lattice.include(t.exponent);

  std::vector<long> ia, ib;
  for (const auto& t : a.terms()) ia.push_back(lattice.index(t.exponent));
  for (const auto& t : b.terms()) ib.push_back(lattice.index(t.exponent));
  const long lo = ia.front() + ib.front();
  const long hi = ia.back() + ib.back();

  std::vector<C> acc(static_cast<std::size_t>(hi - lo + 1), Field<C>::zero(a.mode()));
  std::vector<char> touched(acc.size(), 0);
  for (std::size_t i = 0; i < ia.size(); ++i) {
    const auto& ca = a.terms()[i].coeff;
    for (std::size_t j = 0; j < ib.size(); ++j) {
      auto slot = static_cast<std::size_t>(ia[i] + ib[j] - lo);
      Field<C>::add_product(acc[slot], ca, b.terms()[j].coeff);
      touched[slot] = 1;
    }
  }
  std::vector<Term<C>> out;
  for (std::size_t n = 0; n < acc.size(); ++n)
    if (touched[n]) out.push_back({lattice.exponent(lo + static_cast<long>(n)), std::move(acc[n])});
  return BasisSeries<C>::from_terms(a.params(), a.mode(), std::move(out));
}

template <class C>
BasisSeries<C> series_mul_by_x(const BasisSeries<C>& a) {
  const auto& p = a.params();
  const C inv_beta = Field<C>::make(1 / p.beta, a.mode());
  const C alpha_over_beta = Field<C>::make(-p.alpha / p.beta, a.mode());
  std::vector<Term<C>> out;
  out.reserve(2 * a.size());
  for (const auto& t : a.terms()) {
    if (t.exponent < 1)
      throw BasisEscapeError("x * t^(-" + to_string(t.exponent) + ") is not in the decaying basis");
    out.push_back({t.exponent - 1, t.coeff * inv_beta});
    out.push_back({t.exponent, t.coeff * alpha_over_beta});
  }
  return BasisSeries<C>::from_terms(p, a.mode(), std::move(out));
}

template <class C>
BasisSeries<C> series_d2(const BasisSeries<C>& a) {
  const auto& p = a.params();
  std::vector<Term<C>> out;
  out.reserve(a.size());
  for (const auto& t : a.terms()) {
    if (sgn(t.exponent) == 0) continue;
    Rational factor = t.exponent * (t.exponent + 1) * p.beta * p.beta;
    out.push_back({t.exponent + 2, t.coeff * Field<C>::make(factor, a.mode())});
  }
  return BasisSeries<C>::from_terms(p, a.mode(), std::move(out));
}

template <class C>
BasisSeries<C> series_d1(const BasisSeries<C>& a) {
  const auto& p = a.params();
  std::vector<Term<C>> out;
  out.reserve(a.size());
  for (const auto& t : a.terms()) {
    if (sgn(t.exponent) == 0) continue;
    Rational factor = -t.exponent * p.beta;
    out.push_back({t.exponent + 1, t.coeff * Field<C>::make(factor, a.mode())});
  }
  return BasisSeries<C>::from_terms(p, a.mode(), std::move(out));
}

template <class C>
C value_at_zero(const BasisSeries<C>& a) {
  C sum = Field<C>::zero(a.mode());
  for (const auto& t : a.terms())
    Field<C>::add_product(sum, t.coeff, Field<C>::pow(a.params().alpha, -t.exponent, a.mode()));
  return sum;
}

template <class C>
C deriv_at_zero(const BasisSeries<C>& a, int order) {
  if (order != 1 && order != 2) throw RangeError("deriv_at_zero supports orders 1 and 2");
  return value_at_zero(order == 1 ? series_d1(a) : series_d2(a));
}

template <class C>
Real series_eval(const BasisSeries<C>& a, const Real& x, const NumericMode& mode) {
  if (x.sign() < 0) throw DomainError("series_eval needs x >= 0, got " + x.to_string(20));
  const int prec = mode.is_exact() ? std::max(x.precision(), Real::kDefaultPrecision) : mode.precision;
  const auto& p = a.params();
  Real t = Real(p.alpha, prec) + Real(p.beta, prec) * Field<Real>::to_real(x, prec);
  Real sum(prec);
  for (const auto& term : a.terms())
    sum.add_product(Field<C>::to_real(term.coeff, prec), pow(t, -term.exponent));
  return sum;
}

Rational evaluate_exact(const ExactSeries& a, const Rational& x) {
  if (sgn(x) < 0) throw DomainError("evaluate_exact needs x >= 0");
  const auto& p = a.params();
  Rational t = p.alpha + p.beta * x;
  Rational sum(0);
  for (const auto& term : a.terms()) sum += term.coeff * Field<Rational>::pow(t, -term.exponent, a.mode());
  return sum;
}

ApproxSeries to_approx(const ExactSeries& a, int precision) {
  std::vector<Term<Real>> out;
  out.reserve(a.size());
  for (const auto& t : a.terms()) out.push_back({t.exponent, Real(t.coeff, precision)});
  return ApproxSeries::from_terms(a.params(), NumericMode::approx(precision), std::move(out));
}

template <class C>
nlohmann::json to_json(const BasisSeries<C>& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : s.terms()) terms.push_back({{"e", to_string(t.exponent)}, {"c", Field<C>::render(t.coeff)}});
  return {{"alpha", to_string(s.params().alpha)},
          {"beta", to_string(s.params().beta)},
          {"gamma", to_string(s.params().gamma)},
          {"terms", std::move(terms)}};
}

namespace {

BasisParams params_from_json(const nlohmann::json& j) {
  try {
    BasisParams p{parse_number(j.at("alpha").get<std::string>()), parse_number(j.at("beta").get<std::string>()),
                  parse_number(j.at("gamma").get<std::string>())};
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("series JSON: ") + e.what());
  }
}

template <class C, class Parse>
BasisSeries<C> series_from_json(const nlohmann::json& j, NumericMode mode, Parse parse_coeff) {
  BasisParams p = params_from_json(j);
  std::vector<Term<C>> terms;
  try {
    for (const auto& t : j.at("terms"))
      terms.push_back({parse_number(t.at("e").get<std::string>()), parse_coeff(t.at("c").get<std::string>())});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("series JSON: ") + e.what());
  }
  return BasisSeries<C>::from_terms(std::move(p), mode, std::move(terms));
}

} // namespace

ExactSeries exact_series_from_json(const nlohmann::json& j) {
  return series_from_json<Rational>(j, NumericMode::exact(), [](const std::string& s) { return parse_number(s); });
}

ApproxSeries approx_series_from_json(const nlohmann::json& j, int precision) {
  return series_from_json<Real>(j, NumericMode::approx(precision),
                                [precision](const std::string& s) { return Real::from_string(s, precision); });
}

#define TFHAM_INSTANTIATE(C)                                                          \
  template class BasisSeries<C>;                                                      \
  template BasisSeries<C> series_add(const BasisSeries<C>&, const BasisSeries<C>&);   \
  template BasisSeries<C> series_sub(const BasisSeries<C>&, const BasisSeries<C>&);   \
  template BasisSeries<C> series_scale(const BasisSeries<C>&, const C&);              \
  template BasisSeries<C> series_mul(const BasisSeries<C>&, const BasisSeries<C>&);   \
  template BasisSeries<C> series_mul_by_x(const BasisSeries<C>&);                     \
  template BasisSeries<C> series_d2(const BasisSeries<C>&);                           \
  template BasisSeries<C> series_d1(const BasisSeries<C>&);                           \
  template C value_at_zero(const BasisSeries<C>&);                                    \
  template C deriv_at_zero(const BasisSeries<C>&, int);                               \
  template Real series_eval(const BasisSeries<C>&, const Real&, const NumericMode&);   \
  template nlohmann::json to_json(const BasisSeries<C>&);

TFHAM_INSTANTIATE(Rational)
TFHAM_INSTANTIATE(Real)

#undef TFHAM_INSTANTIATE

} // namespace tfham
