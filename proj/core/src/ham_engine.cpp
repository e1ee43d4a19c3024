#include "tfham/ham_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "tfham/errors.hpp"

namespace tfham {

namespace {

double log2_abs(const Rational& q) {
  if (sgn(q) == 0) return -INFINITY;
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log2(std::fabs(mn)) - std::log2(md) + static_cast<double>(en - ed);
}

double log2_abs(const Real& r) { return r.log2_abs(); }

template <class C>
double magnitude_bits(const BasisSeries<C>& s) {
  const double log2_alpha = log2_abs(s.params().alpha);
  double best = -INFINITY;
  for (const auto& t : s.terms()) best = std::max(best, log2_abs(t.coeff) - t.exponent.get_d() * log2_alpha);
  return best;
}

template <class C>
C max_abs_coefficient(const BasisSeries<C>& s) {
  C best = Field<C>::zero(s.mode());
  for (const auto& t : s.terms()) {
    C a = Field<C>::abs(t.coeff);
    if (best < a) best = a;
  }
  return best;
}

// Running convolutions shared by consecutive orders:
//   squares[m] = sum_{i+j=m} u_i u_j,  curvatures[m] = sum_{i+j=m} u_i'' u_j''.
template <class C>
class Convolutions {
public:
  explicit Convolutions(const BasisParams& p, const NumericMode& mode) : params_(p), mode_(mode) {}

  // Extends the tables so that index m = orders.size() - 1 is available.
  void extend(const std::vector<BasisSeries<C>>& orders) {
    while (d2_.size() < orders.size()) d2_.push_back(series_d2(orders[d2_.size()]));
    while (squares_.size() < orders.size()) {
      const std::size_t m = squares_.size();
      squares_.push_back(symmetric_convolution(orders, m));
      curvatures_.push_back(symmetric_convolution(d2_, m));
    }
  }

  // R_k needs orders 0..k-1 in the tables.
  BasisSeries<C> forcing(const std::vector<BasisSeries<C>>& orders, int k) const {
    const auto m = static_cast<std::size_t>(k - 1);
    BasisSeries<C> cubic(params_, mode_);
    for (std::size_t l = 0; l <= m; ++l) cubic = series_add(cubic, series_mul(orders[l], squares_[m - l]));
    return series_sub(series_mul_by_x(curvatures_[m]), cubic);
  }

private:
  BasisSeries<C> symmetric_convolution(const std::vector<BasisSeries<C>>& f, std::size_t m) const {
    BasisSeries<C> cross(params_, mode_);
    for (std::size_t i = 0; 2 * i < m; ++i) cross = series_add(cross, series_mul(f[i], f[m - i]));
    BasisSeries<C> total = series_add(cross, cross);
    if (m % 2 == 0) total = series_add(total, series_mul(f[m / 2], f[m / 2]));
    return total;
  }

  BasisParams params_;
  NumericMode mode_;
  std::vector<BasisSeries<C>> d2_;
  std::vector<BasisSeries<C>> squares_;
  std::vector<BasisSeries<C>> curvatures_;
};

template <class C>
void require_orders(const DeformationSequence<C>& seq, int needed, const char* what) {
  if (static_cast<int>(seq.orders.size()) < needed)
    throw SequencingError(std::string(what) + " needs orders 0.." + std::to_string(needed - 1) + ", sequence has " +
                          std::to_string(seq.orders.size()));
}

// u_k given R_k and u_{k-1}.
template <class C>
BasisSeries<C> solve_with_forcing(const BasisSeries<C>& previous, const BasisSeries<C>& forcing, const HamConfig& cfg) {
  const auto& mode = previous.mode();
  const auto& p = previous.params();
  BasisSeries<C> v = series_add(previous, series_scale(invert_L(forcing, cfg.op), Field<C>::make(cfg.h, mode)));
  C c1 = Field<C>::pow(p.alpha, p.gamma, mode) * value_at_zero(v);
  c1 = Field<C>::make(Rational(-1), mode) * c1;
  BasisSeries<C> u = series_add(v, BasisSeries<C>::monomial(p, mode, p.gamma, c1));
  // C_2 = 0: the decay condition at infinity must hold without a constant.
  if (!u.is_zero() && sgn(u.min_exponent()) == 0)
    throw BasisEscapeError("order solution acquired a constant term");
  return u;
}

template <class C>
bool residual_is_negligible(const BasisSeries<C>& residual, const std::vector<const BasisSeries<C>*>& operands) {
  if constexpr (Field<C>::exact) {
    (void)operands;
    return residual.is_zero();
  } else {
    if (residual.is_zero()) return true;
    const int prec = residual.mode().precision;
    Real scale(prec);
    for (const auto* s : operands) {
      Real m = max_abs_coefficient(*s);
      if (scale < m) scale = m;
    }
    return max_abs_coefficient(residual) <= ldexp(scale, 32 - prec);
  }
}

} // namespace

void HamConfig::validate() const {
  basis.validate();
  if (sgn(h) >= 0) throw ConfigError("h must be negative, got " + to_string(h));
  if (order < 0) throw ConfigError("order must be >= 0");
  if (!mode.is_exact() && mode.precision < 64) throw ConfigError("precision must be >= 64 bits");
  if (mode.is_exact() && !exact_pow(basis.alpha, Rational(mpz_class(1), basis.gamma.get_den())))
    throw ConfigError("exact mode needs alpha^(1/" + basis.gamma.get_den().get_str() + ") to be rational");
}

template <class C>
C DeformationSequence<C>::partial_slope(int upto) const {
  if (upto < 0 || upto > order()) throw RangeError("partial_slope: order out of range");
  C sum = Field<C>::zero(config.mode);
  for (int k = 0; k <= upto; ++k) sum += slope_per_order[k];
  return sum;
}

template <class C>
C DeformationSequence<C>::partial_curvature(int upto) const {
  if (upto < 0 || upto > order()) throw RangeError("partial_curvature: order out of range");
  C sum = Field<C>::zero(config.mode);
  for (int k = 0; k <= upto; ++k) sum += curvature_per_order[k];
  return sum;
}

template <class C>
bool DeformationSequence<C>::precision_exhausted() const {
  if (config.mode.is_exact()) return false;
  return std::any_of(diagnostics.begin(), diagnostics.end(), [&](const OrderDiagnostics& d) {
    return config.mode.precision - d.magnitude_bits < 32;
  });
}

Rational operator_eigenvalue(const Rational& e, const BasisParams& p, OperatorForm form) {
  const Rational b2 = p.beta * p.beta;
  if (form == OperatorForm::KernelConsistent) return b2 * e * (e - p.gamma) / (p.gamma + 1);
  return b2 * e * (e + 1 - p.alpha - p.gamma) / (p.alpha + p.gamma);
}

Rational kernel_exponent(const BasisParams& p, OperatorForm form) {
  if (form == OperatorForm::KernelConsistent) return p.gamma;
  return p.alpha + p.gamma - 1;
}

template <class C>
BasisSeries<C> initial_guess(const BasisParams& basis, const NumericMode& mode) {
  return BasisSeries<C>::monomial(basis, mode, basis.gamma, Field<C>::make(basis.alpha, mode));
}

template <class C>
BasisSeries<C> apply_L(const BasisSeries<C>& s, OperatorForm form) {
  std::vector<Term<C>> out;
  out.reserve(s.size());
  for (const auto& t : s.terms()) {
    Rational lambda = operator_eigenvalue(t.exponent, s.params(), form);
    if (sgn(lambda) == 0) continue;
    out.push_back({t.exponent + 1, t.coeff * Field<C>::make(lambda, s.mode())});
  }
  return BasisSeries<C>::from_terms(s.params(), s.mode(), std::move(out));
}

template <class C>
BasisSeries<C> invert_L(const BasisSeries<C>& f, OperatorForm form) {
  std::vector<Term<C>> out;
  out.reserve(f.size());
  for (const auto& t : f.terms()) {
    if (t.exponent < 1)
      throw BasisEscapeError("t^(-" + to_string(t.exponent) + ") has no preimage in the decaying basis");
    Rational pre = t.exponent - 1;
    Rational lambda = operator_eigenvalue(pre, f.params(), form);
    if (sgn(lambda) == 0)
      throw ResonanceError("resonant forcing t^(-" + to_string(t.exponent) + "): preimage exponent " +
                               to_string(pre) + " lies in the operator kernel",
                           pre);
    out.push_back({pre, t.coeff * Field<C>::make(1 / lambda, f.mode())});
  }
  return BasisSeries<C>::from_terms(f.params(), f.mode(), std::move(out));
}

template <class C>
BasisSeries<C> compute_Rk(const DeformationSequence<C>& seq, int k) {
  if (k < 1) throw RangeError("compute_Rk needs k >= 1");
  require_orders(seq, k, "compute_Rk");
  std::vector<BasisSeries<C>> lower(seq.orders.begin(), seq.orders.begin() + k);
  Convolutions<C> conv(seq.config.basis, seq.config.mode);
  conv.extend(lower);
  return conv.forcing(lower, k);
}

template <class C>
BasisSeries<C> solve_order(const DeformationSequence<C>& seq, int k) {
  return solve_with_forcing(seq.orders.at(static_cast<std::size_t>(k - 1)), compute_Rk(seq, k), seq.config);
}

template <class C>
DeformationSequence<C> run(const HamConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  DeformationSequence<C> seq;
  seq.config = config;
  const auto& mode = config.mode;

  auto record = [&](BasisSeries<C> u, int k, OrderDiagnostics diag) {
    seq.slope_per_order.push_back(deriv_at_zero(u, 1));
    seq.curvature_per_order.push_back(deriv_at_zero(u, 2));
    diag.k = k;
    diag.term_count = u.size();
    diag.max_exponent = u.is_zero() ? Rational(0) : u.max_exponent();
    diag.magnitude_bits = magnitude_bits(u);
    seq.diagnostics.push_back(std::move(diag));
    seq.orders.push_back(std::move(u));
  };

  auto t0 = clock::now();
  record(initial_guess<C>(config.basis, mode), 0, OrderDiagnostics{});
  seq.diagnostics.back().seconds = std::chrono::duration<double>(clock::now() - t0).count();

  Convolutions<C> conv(config.basis, mode);
  for (int k = 1; k <= config.order; ++k) {
    auto start = clock::now();
    OrderDiagnostics diag;
    try {
      conv.extend(seq.orders);
      BasisSeries<C> forcing = conv.forcing(seq.orders, k);
      diag.min_forcing_exponent = forcing.is_zero() ? Rational(0) : forcing.min_exponent();
      BasisSeries<C> u = solve_with_forcing(seq.orders.back(), forcing, config);

      BasisSeries<C> h_forcing = series_scale(forcing, Field<C>::make(config.h, mode));
      BasisSeries<C> lu = apply_L(u, config.op);
      BasisSeries<C> lprev = apply_L(seq.orders.back(), config.op);
      BasisSeries<C> residual = series_sub(series_sub(lu, lprev), h_forcing);
      diag.residual_verified = residual_is_negligible(residual, {&lu, &lprev, &h_forcing});
      record(std::move(u), k, std::move(diag));
    } catch (const ResonanceError& e) {
      throw EngineError(std::string("order ") + std::to_string(k) + ": " + e.what(), k);
    } catch (const BasisEscapeError& e) {
      throw EngineError(std::string("order ") + std::to_string(k) + ": " + e.what(), k);
    }
    seq.diagnostics.back().seconds = std::chrono::duration<double>(clock::now() - start).count();
  }
  return seq;
}

template <class C>
BasisSeries<C> partial_sum(const DeformationSequence<C>& seq, int upto) {
  if (upto < 0 || upto > seq.order())
    throw RangeError("partial_sum: order " + std::to_string(upto) + " beyond computed order " +
                     std::to_string(seq.order()));
  BasisSeries<C> sum(seq.config.basis, seq.config.mode);
  for (int k = 0; k <= upto; ++k) sum = series_add(sum, seq.orders[static_cast<std::size_t>(k)]);
  return sum;
}

template <class C>
BasisSeries<C> order_residual(const DeformationSequence<C>& seq, int k) {
  if (k < 1) throw RangeError("order_residual needs k >= 1");
  require_orders(seq, k + 1, "order_residual");
  const auto op = seq.config.op;
  BasisSeries<C> lhs = series_sub(apply_L(seq.orders[static_cast<std::size_t>(k)], op),
                                  apply_L(seq.orders[static_cast<std::size_t>(k - 1)], op));
  return series_sub(lhs, series_scale(compute_Rk(seq, k), Field<C>::make(seq.config.h, seq.config.mode)));
}

template <class C>
std::vector<Real> original_residual(const BasisSeries<C>& s, const std::vector<Real>& grid) {
  const NumericMode eval_mode = s.mode().is_exact() ? NumericMode::approx(128) : s.mode();
  const BasisSeries<C> curvature = series_d2(s);
  std::vector<Real> out;
  out.reserve(grid.size());
  for (const auto& x : grid) {
    if (x.sign() <= 0) throw DomainError("original_residual needs x > 0, got " + x.to_string(20));
    Real u = series_eval(s, x, eval_mode);
    if (u.sign() <= 0) throw BranchError("series is non-positive at x = " + x.to_string(20));
    Real u2 = series_eval(curvature, x, eval_mode);
    Real xr = Field<Real>::to_real(x, eval_mode.precision);
    out.push_back(u2 - sqrt(u * u * u / xr));
  }
  return out;
}

nlohmann::json to_json(const HamConfig& c) {
  return {{"alpha", to_string(c.basis.alpha)},
          {"beta", to_string(c.basis.beta)},
          {"gamma", to_string(c.basis.gamma)},
          {"h", to_string(c.h)},
          {"order", c.order},
          {"mode", c.mode.is_exact() ? "exact" : "float"},
          {"precision", c.mode.is_exact() ? 0 : c.mode.precision},
          {"operator", c.op == OperatorForm::KernelConsistent ? "kernel-consistent" : "as-printed"}};
}

template <class C>
nlohmann::json run_summary(const DeformationSequence<C>& seq, const RunSummaryOptions& opts) {
  using nlohmann::json;
  const int n = seq.order();
  json slopes = json::array(), curvs = json::array(), partial = json::array(), partial_curv = json::array();
  json terms = json::array(), max_exp = json::array(), verified = json::array(), magnitude = json::array();
  json seconds = json::array();
  C running_slope = Field<C>::zero(seq.config.mode);
  C running_curv = Field<C>::zero(seq.config.mode);
  for (int k = 0; k <= n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    running_slope += seq.slope_per_order[uk];
    running_curv += seq.curvature_per_order[uk];
    slopes.push_back(Field<C>::render(seq.slope_per_order[uk]));
    curvs.push_back(Field<C>::render(seq.curvature_per_order[uk]));
    partial.push_back(Field<C>::render(running_slope));
    partial_curv.push_back(Field<C>::render(running_curv));
    const auto& d = seq.diagnostics[uk];
    terms.push_back(d.term_count);
    max_exp.push_back(to_string(d.max_exponent));
    verified.push_back(d.residual_verified);
    magnitude.push_back(std::round(d.magnitude_bits * 100) / 100);
    seconds.push_back(d.seconds);
  }
  json out = {{"config", to_json(seq.config)},
              {"slope", Field<C>::render(running_slope)},
              {"curvature", Field<C>::render(running_curv)},
              {"slope_per_order", std::move(slopes)},
              {"curvature_per_order", std::move(curvs)},
              {"partial_slope", std::move(partial)},
              {"partial_curvature", std::move(partial_curv)},
              {"term_counts", std::move(terms)},
              {"max_exponents", std::move(max_exp)},
              {"residual_verified", std::move(verified)},
              {"magnitude_bits", std::move(magnitude)},
              {"precision_exhausted", seq.precision_exhausted()}};
  if constexpr (Field<C>::exact) {
    out["slope_decimal"] = Real(running_slope, 256).to_string(40);
    out["curvature_decimal"] = Real(running_curv, 256).to_string(40);
  }
  if (opts.include_timings) out["seconds_per_order"] = std::move(seconds);
  return out;
}

#define TFHAM_INSTANTIATE(C)                                                                           \
  template struct DeformationSequence<C>;                                                              \
  template BasisSeries<C> initial_guess<C>(const BasisParams&, const NumericMode&);                    \
  template BasisSeries<C> apply_L(const BasisSeries<C>&, OperatorForm);                                \
  template BasisSeries<C> invert_L(const BasisSeries<C>&, OperatorForm);                               \
  template BasisSeries<C> compute_Rk(const DeformationSequence<C>&, int);                              \
  template BasisSeries<C> solve_order(const DeformationSequence<C>&, int);                             \
  template DeformationSequence<C> run<C>(const HamConfig&);                                            \
  template BasisSeries<C> partial_sum(const DeformationSequence<C>&, int);                             \
  template BasisSeries<C> order_residual(const DeformationSequence<C>&, int);                          \
  template std::vector<Real> original_residual(const BasisSeries<C>&, const std::vector<Real>&);       \
  template nlohmann::json run_summary(const DeformationSequence<C>&, const RunSummaryOptions&);

TFHAM_INSTANTIATE(Rational)
TFHAM_INSTANTIATE(Real)

#undef TFHAM_INSTANTIATE

} // namespace tfham
