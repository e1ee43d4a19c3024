#include <benchmark/benchmark.h>

#include <vector>

#include "tfham/basis_series.hpp"
#include "tfham/ham_engine.hpp"
#include "tfham/reference_solver.hpp"
#include "tfham/series_accel.hpp"

namespace {

using namespace tfham;

const BasisParams kPresent{Rational(3, 4), Rational(1), Rational(1)};

// Dense series with exponents k/4, the shape the engine produces.
ApproxSeries dense_series(int terms, int precision) {
  std::vector<Term<Real>> out;
  for (int k = 1; k <= terms; ++k) out.push_back({Rational(k, 4), Real(1.0 / k, precision)});
  return ApproxSeries::from_terms(kPresent, NumericMode::approx(precision), std::move(out));
}

void BM_SeriesMul(benchmark::State& state) {
  const auto a = dense_series(static_cast<int>(state.range(0)), 256);
  for (auto _ : state) benchmark::DoNotOptimize(a * a);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SeriesMul)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_HamRun(benchmark::State& state) {
  HamConfig c;
  c.basis = kPresent;
  c.h = Rational(-4, 5);
  c.order = static_cast<int>(state.range(0));
  c.mode = NumericMode::approx(256);
  for (auto _ : state) benchmark::DoNotOptimize(run<Real>(c));
}
BENCHMARK(BM_HamRun)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_PadeDirect(benchmark::State& state) {
  HamConfig c;
  c.basis = kPresent;
  c.h = Rational(-3, 4);
  c.order = 20;
  c.mode = NumericMode::approx(512);
  const auto tail = CoefficientTail<Real>::from_sequence(run<Real>(c));
  for (auto _ : state) benchmark::DoNotOptimize(pade_at_one(tail, 10));
}
BENCHMARK(BM_PadeDirect)->Unit(benchmark::kMicrosecond);

void BM_Shooting(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(find_initial_slope());
}
BENCHMARK(BM_Shooting)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
