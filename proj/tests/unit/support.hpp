#pragma once

// Seeded generators for property tests. Every draw is reproducible from the
// seed printed in the failing check's context.

#include <cstdint>
#include <random>
#include <vector>

#include "tfham/basis_series.hpp"

namespace tfham::testing {

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// p/q with p in [-9, 9] \ {0}, q in [1, 9].
  Rational nonzero_rational() {
    int p = 0;
    while (p == 0) p = integer(-9, 9);
    Rational r(p, integer(1, 9));
    r.canonicalize();
    return r;
  }

  /// Exponent n/d with d in {1, 2, 3} and n/d in [lo, hi].
  Rational exponent(int lo, int hi, int max_den = 3) {
    const int d = integer(1, max_den);
    Rational e(integer(lo * d, hi * d), d);
    e.canonicalize();
    return e;
  }

  ExactSeries series(const BasisParams& p, int max_terms, int lo, int hi, int max_den = 3) {
    std::vector<Term<Rational>> terms;
    const int n = integer(1, max_terms);
    for (int i = 0; i < n; ++i) terms.push_back({exponent(lo, hi, max_den), nonzero_rational()});
    return ExactSeries::from_terms(p, NumericMode::exact(), std::move(terms));
  }

  BasisParams params() {
    BasisParams p{Rational(integer(1, 8), integer(1, 4)), Rational(integer(1, 6), integer(1, 3)), Rational(1)};
    p.alpha.canonicalize();
    p.beta.canonicalize();
    return p;
  }

private:
  std::mt19937_64 rng_;
};

inline bool relatively_close(const Real& a, const Real& b, double rel) {
  Real scale = abs(b);
  if (scale.is_zero()) return abs(a).to_double() <= rel;
  return (abs(a - b) / scale).to_double() <= rel;
}

} // namespace tfham::testing
