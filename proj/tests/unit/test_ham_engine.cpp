#include <doctest.h>

#include "support.hpp"
#include "tfham/errors.hpp"
#include "tfham/ham_engine.hpp"

using namespace tfham;
using tfham::testing::Gen;
using tfham::testing::relatively_close;

namespace {

const BasisParams kUnit{Rational(1), Rational(1), Rational(1)};
const BasisParams kPresent{Rational(3, 4), Rational(1), Rational(1)};

HamConfig exact_config(const BasisParams& b, const Rational& h, int order, OperatorForm op = OperatorForm::KernelConsistent) {
  HamConfig c;
  c.basis = b;
  c.h = h;
  c.order = order;
  c.mode = NumericMode::exact();
  c.op = op;
  return c;
}

HamConfig approx_config(const BasisParams& b, const Rational& h, int order, int precision) {
  HamConfig c = exact_config(b, h, order);
  c.mode = NumericMode::approx(precision);
  return c;
}

} // namespace

TEST_SUITE("ham_engine") {
  TEST_CASE("operator eigenvalues and kernels") {
    CHECK(operator_eigenvalue(Rational(3), kUnit) == Rational(3));
    CHECK(operator_eigenvalue(Rational(1), kUnit) == Rational(0));
    CHECK(operator_eigenvalue(Rational(0), kPresent) == Rational(0));
    const BasisParams b{Rational(1), Rational(2), Rational(1, 2)};
    CHECK(operator_eigenvalue(Rational(3, 2), b) == Rational(4));
    CHECK(kernel_exponent(kPresent) == Rational(1));
    CHECK(kernel_exponent(kPresent, OperatorForm::AsPrinted) == Rational(3, 4));
    // The two forms coincide at alpha = 1.
    CHECK(operator_eigenvalue(Rational(5, 2), kUnit, OperatorForm::AsPrinted) == operator_eigenvalue(Rational(5, 2), kUnit));
  }

  TEST_CASE("apply_L and invert_L on monomials") {
    auto m = ExactSeries::monomial(kUnit, NumericMode::exact(), Rational(3), Rational(2));
    auto lm = apply_L(m);
    CHECK(lm.coefficient(Rational(4)) == Rational(6));
    CHECK(apply_L(ExactSeries::monomial(kUnit, NumericMode::exact(), Rational(1), Rational(5))).is_zero());
    CHECK(to_json(invert_L(lm)) == to_json(m));
  }

  TEST_CASE("invert_L reports resonance and basis escape") {
    auto resonant = ExactSeries::monomial(kUnit, NumericMode::exact(), Rational(2), Rational(1));
    try {
      (void)invert_L(resonant);
      FAIL("expected ResonanceError");
    } catch (const ResonanceError& e) {
      CHECK(e.exponent() == Rational(1));
    }
    CHECK_THROWS_AS(invert_L(ExactSeries::monomial(kUnit, NumericMode::exact(), Rational(1), Rational(1))), ResonanceError);
    CHECK_THROWS_AS(invert_L(ExactSeries::monomial(kUnit, NumericMode::exact(), Rational(1, 2), Rational(1))),
                    BasisEscapeError);
  }

  TEST_CASE("first forcing term R_1") {
    {
      auto seq = run<Rational>(exact_config(kUnit, Rational(-1, 2), 0));
      auto r1 = compute_Rk(seq, 1);
      CHECK(r1.size() == 3);
      CHECK(r1.coefficient(Rational(3)) == Rational(-1));
      CHECK(r1.coefficient(Rational(5)) == Rational(4));
      CHECK(r1.coefficient(Rational(6)) == Rational(-4));
    }
    {
      auto seq = run<Rational>(exact_config(kPresent, Rational(-3, 4), 0));
      auto r1 = compute_Rk(seq, 1);
      CHECK(r1.size() == 3);
      CHECK(r1.coefficient(Rational(3)) == Rational(-27, 64));
      CHECK(r1.coefficient(Rational(5)) == Rational(9, 4));
      CHECK(r1.coefficient(Rational(6)) == Rational(-27, 16));
    }
    auto seq = run<Rational>(exact_config(kUnit, Rational(-1, 2), 0));
    CHECK_THROWS_AS(compute_Rk(seq, 2), SequencingError);
    CHECK_THROWS_AS(compute_Rk(seq, 0), RangeError);
  }

  TEST_CASE("first-order solution at alpha = beta = gamma = 1") {
    for (const Rational& h : {Rational(-1, 2), Rational(-3, 4), Rational(-2)}) {
      auto seq = run<Rational>(exact_config(kUnit, h, 1));
      const auto& u1 = seq.orders[1];
      CHECK(u1.size() == 4);
      CHECK(u1.coefficient(Rational(1)) == h * Rational(11, 15));
      CHECK(u1.coefficient(Rational(2)) == -h);
      CHECK(u1.coefficient(Rational(4)) == h * Rational(2, 3));
      CHECK(u1.coefficient(Rational(5)) == h * Rational(-2, 5));
      CHECK(seq.slope_per_order[1] == h * Rational(3, 5));
      CHECK(value_at_zero(u1) == 0);
    }
  }

  TEST_CASE("initial guess values") {
    auto seq = run<Rational>(exact_config(kUnit, Rational(-1, 2), 0));
    CHECK(seq.slope_per_order[0] == Rational(-1));
    CHECK(seq.curvature_per_order[0] == Rational(2));
    auto present = run<Rational>(exact_config(kPresent, Rational(-1, 2), 0));
    CHECK(present.slope_per_order[0] == Rational(-4, 3));
    CHECK(value_at_zero(present.orders[0]) == Rational(1));
  }

  TEST_CASE("configuration validation") {
    CHECK_THROWS_AS(run<Rational>(exact_config(kUnit, Rational(0), 2)), ConfigError);
    CHECK_THROWS_AS(run<Rational>(exact_config(kUnit, Rational(1, 2), 2)), ConfigError);
    CHECK_THROWS_AS(run<Rational>(exact_config(kUnit, Rational(-1, 2), -1)), ConfigError);
    CHECK_THROWS_AS(run<Real>(approx_config(kUnit, Rational(-1, 2), 2, 32)), ConfigError);
    const BasisParams irrational{Rational(3, 4), Rational(1), Rational(3, 2)};
    CHECK_THROWS_AS(run<Rational>(exact_config(irrational, Rational(-1, 2), 2)), ConfigError);
    CHECK_NOTHROW(run<Real>(approx_config(irrational, Rational(-1, 2), 2, 128)));
    // gamma = 1/2: the order-1 forcing t^(-3/2) has preimage t^(-1/2), the kernel.
    const BasisParams resonant{Rational(3, 4), Rational(1), Rational(1, 2)};
    CHECK_THROWS_AS(run<Real>(approx_config(resonant, Rational(-1, 2), 2, 128)), EngineError);
    CHECK_THROWS_AS(run<Rational>(exact_config({Rational(1), Rational(0), Rational(1)}, Rational(-1, 2), 1)), ConfigError);
  }

  TEST_CASE("deformation identity and boundary value hold exactly") {
    for (const auto& [basis, h] : {std::pair{kPresent, Rational(-3, 4)}, std::pair{kUnit, Rational(-1, 2)}}) {
      auto seq = run<Rational>(exact_config(basis, h, 6));
      for (int k = 1; k <= 6; ++k) {
        CHECK(order_residual(seq, k).is_zero());
        CHECK(value_at_zero(seq.orders[static_cast<std::size_t>(k)]) == 0);
        CHECK(seq.diagnostics[static_cast<std::size_t>(k)].residual_verified);
      }
      CHECK_THROWS_AS(order_residual(seq, 0), RangeError);
      CHECK_THROWS_AS(partial_sum(seq, 7), RangeError);
    }
  }

  TEST_CASE("printed operator breaks the deformation identity off alpha = 1") {
    auto printed = run<Rational>(exact_config(kPresent, Rational(-3, 4), 2, OperatorForm::AsPrinted));
    CHECK_FALSE(order_residual(printed, 1).is_zero());
    CHECK_FALSE(printed.diagnostics[1].residual_verified);
    auto unit = run<Rational>(exact_config(kUnit, Rational(-1, 2), 3, OperatorForm::AsPrinted));
    auto reference = run<Rational>(exact_config(kUnit, Rational(-1, 2), 3));
    for (int k = 0; k <= 3; ++k)
      CHECK(to_json(unit.orders[static_cast<std::size_t>(k)]) == to_json(reference.orders[static_cast<std::size_t>(k)]));
  }

  TEST_CASE("exact and 256-bit runs agree") {
    auto exact = run<Rational>(exact_config(kPresent, Rational(-3, 4), 8));
    auto approx = run<Real>(approx_config(kPresent, Rational(-3, 4), 8, 256));
    for (int k = 0; k <= 8; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      CHECK(relatively_close(approx.slope_per_order[uk], Real(exact.slope_per_order[uk], 256), 1e-60));
      CHECK(approx.diagnostics[uk].residual_verified);
    }
    CHECK_FALSE(approx.precision_exhausted());
  }

  TEST_CASE("approximate residual shrinks with the working precision") {
    auto seq = run<Real>(approx_config(kPresent, Rational(-3, 4), 5, 512));
    auto r = order_residual(seq, 5);
    for (const auto& t : r.terms()) CHECK(t.coeff.log2_abs() <= -480);
  }

  TEST_CASE("partial sums accumulate the per-order derivatives") {
    auto seq = run<Rational>(exact_config(kUnit, Rational(-1, 2), 3));
    auto sum = partial_sum(seq, 3);
    CHECK(deriv_at_zero(sum, 1) == seq.partial_slope(3));
    CHECK(deriv_at_zero(sum, 2) == seq.partial_curvature(3));
    CHECK(value_at_zero(sum) == 1);
    CHECK_THROWS_AS(seq.partial_slope(4), RangeError);
  }

  TEST_CASE("original residual guards domain and branch") {
    auto seq = run<Real>(approx_config(kPresent, Rational(-4, 5), 10, 256));
    auto sum = partial_sum(seq, 10);
    CHECK_THROWS_AS(original_residual(sum, {Real(0, 256)}), DomainError);
    auto negative = ApproxSeries::constant(kPresent, NumericMode::approx(256), Real(-1, 256));
    CHECK_THROWS_AS(original_residual(negative, {Real(1, 256)}), BranchError);
    auto r = original_residual(sum, {Real(1, 256), Real(2, 256)});
    CHECK(std::abs(r[0].to_double()) < 0.1);
  }

  TEST_CASE("run summary is deterministic and hides timings by default") {
    auto a = run_summary(run<Real>(approx_config(kPresent, Rational(-3, 4), 4, 256)));
    auto b = run_summary(run<Real>(approx_config(kPresent, Rational(-3, 4), 4, 256)));
    CHECK(a.dump() == b.dump());
    CHECK_FALSE(a.contains("seconds_per_order"));
    CHECK(a["slope_per_order"].size() == 5);
    auto timed = run_summary(run<Real>(approx_config(kPresent, Rational(-3, 4), 2, 128)), {true});
    CHECK(timed.contains("seconds_per_order"));
    auto exact = run_summary(run<Rational>(exact_config(kUnit, Rational(-1, 2), 1)));
    CHECK(exact["slope"] == "-13/10");
    CHECK(exact.contains("slope_decimal"));
  }
}

TEST_SUITE("ham_engine.property") {
  TEST_CASE("invert_L undoes apply_L off the kernel") {
    Gen g(21);
    for (int trial = 0; trial < 200; ++trial) {
      BasisParams p = g.params();
      p.gamma = g.exponent(1, 2, 2);
      auto s = g.series(p, 6, 1, 8);
      std::vector<Term<Rational>> kept;
      for (const auto& t : s.terms())
        if (t.exponent != p.gamma && t.exponent != 0) kept.push_back(t);
      auto clean = ExactSeries::from_terms(p, NumericMode::exact(), kept);
      CHECK(to_json(invert_L(apply_L(clean))) == to_json(clean));
      auto f = apply_L(clean);
      CHECK(to_json(apply_L(invert_L(f))) == to_json(f));
    }
  }

  TEST_CASE("no resonance over the parameter grid") {
    for (const auto& basis : {kPresent, kUnit, BasisParams{Rational(1, 2), Rational(2), Rational(1)}})
      for (const Rational& h : {Rational(-1, 2), Rational(-3, 4), Rational(-4, 5), Rational(-6, 5)}) {
        auto seq = run<Real>(approx_config(basis, h, 12, 256));
        for (const auto& d : seq.diagnostics) CHECK(d.residual_verified);
      }
  }

  TEST_CASE("exact identity holds for random rational h") {
    Gen g(22);
    for (int trial = 0; trial < 6; ++trial) {
      const Rational h(-g.integer(1, 9), g.integer(1, 9));
      auto seq = run<Rational>(exact_config(kPresent, h, 4));
      for (int k = 1; k <= 4; ++k) {
        CHECK(order_residual(seq, k).is_zero());
        CHECK(value_at_zero(seq.orders[static_cast<std::size_t>(k)]) == 0);
      }
    }
  }
}
