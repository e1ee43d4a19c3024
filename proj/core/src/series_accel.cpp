#include "tfham/series_accel.hpp"

#include <cmath>

#include "tfham/errors.hpp"

namespace tfham {

namespace {

template <class C>
C zero_like(const C& sample) {
  if constexpr (Field<C>::exact)
    return Rational(0);
  else
    return Real(sample.precision());
}

template <class C>
C one_like(const C& sample) {
  if constexpr (Field<C>::exact)
    return Rational(1);
  else
    return Real(1, sample.precision());
}

// Whether the difference of two table entries counts as zero.
template <class C>
bool vanishing_difference(const C& diff, const C& a, const C& b) {
  if constexpr (Field<C>::exact) {
    (void)a;
    (void)b;
    return sgn(diff) == 0;
  } else {
    if (diff.is_zero()) return true;
    Real scale = std::max(abs(a), abs(b));
    return abs(diff) <= ldexp(scale, 16 - diff.precision());
  }
}

// Pivot magnitude at or below which the system counts as singular.
template <class C>
bool negligible_pivot(const C& pivot, const C& scale) {
  if constexpr (Field<C>::exact) {
    (void)scale;
    return sgn(pivot) == 0;
  } else {
    return abs(pivot) <= ldexp(scale, 16 - pivot.precision());
  }
}

template <class C>
C magnitude(const C& v) {
  return Field<C>::abs(v);
}

// Solves A x = rhs in place by Gaussian elimination with partial pivoting.
template <class C>
std::vector<C> solve_dense(std::vector<std::vector<C>> a, std::vector<C> rhs, int m) {
  const std::size_t n = rhs.size();
  C scale = zero_like(rhs.front());
  for (const auto& row : a)
    for (const auto& v : row)
      if (scale < magnitude(v)) scale = magnitude(v);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (magnitude(a[pivot][col]) < magnitude(a[r][col])) pivot = r;
    if (negligible_pivot(a[pivot][col], scale))
      throw DegeneracyError("[" + std::to_string(m) + "/" + std::to_string(m) + "] Pade denominator system is singular");
    std::swap(a[pivot], a[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      C factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<C> x(n, zero_like(rhs.front()));
  for (std::size_t i = n; i-- > 0;) {
    C acc = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

} // namespace

std::string to_string(PadeMethod m) { return m == PadeMethod::DirectSolve ? "direct" : "epsilon"; }

template <class C>
std::vector<C> CoefficientTail<C>::partial_sums() const {
  std::vector<C> out;
  out.reserve(coefficients.size());
  for (const auto& a : coefficients) {
    if (out.empty())
      out.push_back(a);
    else
      out.push_back(out.back() + a);
  }
  return out;
}

template <class C>
PadeResult<C> pade_at_one(const CoefficientTail<C>& tail, int m) {
  if (m < 0) throw RangeError("Pade degree must be >= 0");
  if (tail.size() < static_cast<std::size_t>(2 * m + 1))
    throw RangeError("[" + std::to_string(m) + "/" + std::to_string(m) + "] needs " + std::to_string(2 * m + 1) +
                     " coefficients, tail has " + std::to_string(tail.size()));
  const auto& a = tail.coefficients;
  if (m == 0) return {0, a[0], PadeMethod::DirectSolve};

  const C zero = zero_like(a[0]);
  auto coeff = [&](int i) -> const C& { return i < 0 ? zero : a[static_cast<std::size_t>(i)]; };

  // sum_{j=1..m} q_j a_{m+i-j} = -a_{m+i}, i = 1..m, with q_0 = 1.
  std::vector<std::vector<C>> sys(static_cast<std::size_t>(m), std::vector<C>(static_cast<std::size_t>(m), zero));
  std::vector<C> rhs(static_cast<std::size_t>(m), zero);
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= m; ++j) sys[i - 1][j - 1] = coeff(m + i - j);
    rhs[i - 1] = zero - coeff(m + i);
  }
  std::vector<C> q = solve_dense(std::move(sys), std::move(rhs), m);
  q.insert(q.begin(), one_like(a[0]));

  C num = zero, den = zero;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= i; ++j) Field<C>::add_product(num, q[static_cast<std::size_t>(j)], coeff(i - j));
    den += q[static_cast<std::size_t>(i)];
  }
  C qscale = zero;
  for (const auto& v : q)
    if (qscale < magnitude(v)) qscale = magnitude(v);
  if (negligible_pivot(den, qscale))
    throw DegeneracyError("[" + std::to_string(m) + "/" + std::to_string(m) + "] Pade approximant has a pole at p = 1");
  return {m, num / den, PadeMethod::DirectSolve};
}

template <class C>
std::optional<C> EpsilonTable<C>::diagonal(int m) const {
  const auto k = static_cast<std::size_t>(2 * m);
  if (m < 0 || k >= columns_.size() || columns_[k].empty()) return std::nullopt;
  return columns_[k][0];
}

// Table entry during construction: a finite value, a genuine infinity
// (reciprocal of a zero difference of finite entries), or an indeterminate
// form that only a singular rule could resolve.
template <class C>
struct Cell {
  enum class Kind { Finite, Infinite, Indeterminate };
  Kind kind = Kind::Finite;
  std::optional<C> value;

  static Cell finite(C v) { return {Kind::Finite, std::move(v)}; }
  static Cell infinite() { return {Kind::Infinite, std::nullopt}; }
  static Cell indeterminate() { return {Kind::Indeterminate, std::nullopt}; }
};

// eps_{k+1}^(j) = eps_{k-1}^(j+1) + 1 / (eps_k^(j+1) - eps_k^(j)).
// An infinite neighbour makes the reciprocal vanish, so the entry inherits
// eps_{k-1}^(j+1); two infinite neighbours are treated the same way (their
// generic difference is still infinite), which keeps constant runs exact.
// inf + inf from an infinite base and a zero difference is indeterminate, and
// indeterminacy propagates: such entries are reported, never guessed.
template <class C>
Cell<C> rhombus(const Cell<C>& base, const Cell<C>& a, const Cell<C>& b) {
  using K = typename Cell<C>::Kind;
  if (base.kind == K::Indeterminate || a.kind == K::Indeterminate || b.kind == K::Indeterminate)
    return Cell<C>::indeterminate();
  if (a.kind == K::Infinite || b.kind == K::Infinite) return base;
  C diff = *b.value - *a.value;
  const bool vanishing = vanishing_difference(diff, *b.value, *a.value);
  if (base.kind == K::Infinite) return vanishing ? Cell<C>::indeterminate() : Cell<C>::infinite();
  if (vanishing) return Cell<C>::infinite();
  return Cell<C>::finite(*base.value + one_like(diff) / diff);
}

template <class C>
EpsilonTable<C> wynn_epsilon(const std::vector<C>& partial_sums) {
  if (partial_sums.size() < 3) throw RangeError("epsilon table needs at least three partial sums");
  EpsilonTable<C> table;
  const C zero = zero_like(partial_sums.front());
  std::vector<Cell<C>> previous(partial_sums.size() + 1, Cell<C>::finite(zero)); // eps_{-1}
  std::vector<Cell<C>> current;
  for (const auto& s : partial_sums) current.push_back(Cell<C>::finite(s));

  auto record = [&](const std::vector<Cell<C>>& cells) {
    std::vector<std::optional<C>> column;
    column.reserve(cells.size());
    for (const auto& c : cells) column.push_back(c.value);
    table.columns_.push_back(std::move(column));
  };
  record(current);
  while (current.size() > 1) {
    std::vector<Cell<C>> next;
    next.reserve(current.size() - 1);
    for (std::size_t j = 0; j + 1 < current.size(); ++j) next.push_back(rhombus(previous[j + 1], current[j], current[j + 1]));
    previous = std::move(current);
    current = std::move(next);
    record(current);
  }
  return table;
}

template <class C>
PadeResult<C> pade_by_epsilon(const CoefficientTail<C>& tail, int m) {
  if (m < 0) throw RangeError("Pade degree must be >= 0");
  if (tail.size() < static_cast<std::size_t>(2 * m + 1))
    throw RangeError("[" + std::to_string(m) + "/" + std::to_string(m) + "] needs " + std::to_string(2 * m + 1) +
                     " coefficients, tail has " + std::to_string(tail.size()));
  if (m == 0) return {0, tail.coefficients[0], PadeMethod::Epsilon};
  auto sums = tail.partial_sums();
  sums.resize(static_cast<std::size_t>(2 * m + 1), sums.front());
  auto value = wynn_epsilon(sums).diagonal(m);
  if (!value)
    throw DegeneracyError("[" + std::to_string(m) + "/" + std::to_string(m) + "] epsilon entry is unavailable");
  return {m, *value, PadeMethod::Epsilon};
}

template <class C>
AcceleratedValue<C> accelerate(const CoefficientTail<C>& tail, int m) {
  auto direct = [&] { return pade_at_one(tail, m); };
  auto epsilon = [&] { return pade_by_epsilon(tail, m); };
  AcceleratedValue<C> out{Field<C>::exact ? direct() : epsilon(), std::nullopt, std::nullopt};
  try {
    out.check = Field<C>::exact ? epsilon() : direct();
  } catch (const DegeneracyError&) {
    return out;
  }
  const C& p = out.primary.value;
  C gap = Field<C>::abs(p - out.check->value);
  if constexpr (Field<C>::exact) {
    out.relative_gap = sgn(p) == 0 ? gap.get_d() : Rational(gap / Field<C>::abs(p)).get_d();
  } else {
    out.relative_gap = p.is_zero() ? gap.to_double() : (gap / abs(p)).to_double();
  }
  return out;
}

double error_percent(double value, double reference) {
  if (reference == 0) throw DomainError("error_percent: zero reference");
  return 100.0 * std::fabs(value - reference) / std::fabs(reference);
}

Real error_percent(const Real& value, const Real& reference) {
  if (reference.is_zero()) throw DomainError("error_percent: zero reference");
  return Real(100, value.precision()) * abs(value - reference) / abs(reference);
}

#define TFHAM_INSTANTIATE(C)                                                   \
  template struct CoefficientTail<C>;                                          \
  template class EpsilonTable<C>;                                              \
  template PadeResult<C> pade_at_one(const CoefficientTail<C>&, int);          \
  template EpsilonTable<C> wynn_epsilon(const std::vector<C>&);                \
  template PadeResult<C> pade_by_epsilon(const CoefficientTail<C>&, int);      \
  template AcceleratedValue<C> accelerate(const CoefficientTail<C>&, int);

TFHAM_INSTANTIATE(Rational)
TFHAM_INSTANTIATE(Real)

#undef TFHAM_INSTANTIATE

} // namespace tfham
