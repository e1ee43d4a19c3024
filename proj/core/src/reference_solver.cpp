#include "tfham/reference_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "tfham/errors.hpp"

namespace tfham {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<long double, 2>;
using Stepper = odeint::runge_kutta_fehlberg78<State, long double, State, long double>;

constexpr int kExpansionTerms = 16;
constexpr long double kMinStep = 1e-30L;
constexpr long kMaxSteps = 10'000'000;

// Integration runs in s = sqrt(x), where the system is smooth at the origin:
// du/ds = 2 s u', du'/ds = 2 sqrt(u^3). In x, u'' ~ x^(-1/2) defeats the
// embedded error estimate near the start and biases the shooting slope.
void thomas_fermi(const State& y, State& dyds, long double s) {
  const long double u = std::max(y[0], 0.0L);
  dyds[0] = 2 * s * y[1];
  dyds[1] = 2 * std::sqrt(u * u * u);
}

// Integrates from x_start, calling visit(x, y) after every accepted step.
// visit returns false to stop. Steps are clipped so that every stop in
// `stops` (ascending) is hit exactly; on_stop is called there.
template <class Visit, class OnStop>
void integrate(long double slope, const ShootingConfig& cfg, const std::vector<long double>& stops, Visit visit,
               OnStop on_stop) {
  auto stepper = odeint::make_controlled(cfg.ode_tol, cfg.ode_tol, Stepper());
  auto [u0, du0] = small_x_state(slope, cfg.x_start);
  State y{u0, du0};
  long double s = std::sqrt(cfg.x_start);
  long double ds = s * 0.1L;
  const long double s_max = std::sqrt(cfg.x_max);
  auto next_stop = stops.begin();
  while (next_stop != stops.end() && *next_stop <= cfg.x_start) ++next_stop;

  for (long steps = 0; s < s_max; ++steps) {
    if (steps > kMaxSteps) throw IntegrationError("too many steps", s * s);
    const bool at_stop = next_stop != stops.end() && *next_stop < cfg.x_max;
    const long double target_x = at_stop ? *next_stop : cfg.x_max;
    const long double target = at_stop ? std::sqrt(target_x) : s_max;
    const bool clipped = s + ds >= target;
    if (clipped) ds = target - s;
    if (stepper.try_step(thomas_fermi, y, s, ds) == odeint::fail) {
      if (ds < kMinStep) throw IntegrationError("step size underflow", s * s);
      continue;
    }
    long double x = s * s;
    if (clipped) {
      s = target;
      x = target_x;
      if (next_stop != stops.end() && *next_stop == target_x) {
        on_stop(x, y);
        ++next_stop;
      }
    }
    if (!visit(x, y)) return;
  }
}

} // namespace

void ShootingConfig::validate() const {
  if (!(x_start > 0 && x_start <= 1e-4L)) throw ConfigError("x_start must lie in (0, 1e-4]");
  if (!(x_max > 1)) throw ConfigError("x_max must exceed 1");
  if (!(ode_tol > 0) || !(bracket_tol > 0)) throw ConfigError("tolerances must be positive");
  if (!(bracket_lo < bracket_hi)) throw ConfigError("bracket must satisfy lo < hi");
}

SlopeSide classify(const ShotOutcome& outcome, long double x_max) {
  if (std::holds_alternative<CrossedZero>(outcome)) return SlopeSide::Below;
  if (std::holds_alternative<TurnedUpward>(outcome)) return SlopeSide::Above;
  const auto& far = std::get<ReachedFarBoundary>(outcome);
  return x_max * far.u_prime + 3 * far.u < 0 ? SlopeSide::Below : SlopeSide::Above;
}

std::vector<long double> singular_expansion(long double slope, int count) {
  // u = sum c_n s^n with s = sqrt(x). Matching s^(n-4) in u'' = s^(-1) w,
  // w = u^(3/2) = sum w_m s^m, gives (n/2)(n/2 - 1) c_n = w_{n-3}; w follows
  // from the power recurrence m c_0 w_m = sum_{k=1..m} ((3/2 + 1) k - m) c_k w_{m-k}.
  std::vector<long double> c(static_cast<std::size_t>(std::max(count, 3)), 0.0L);
  c[0] = 1;
  c[1] = 0;
  c[2] = slope;
  std::vector<long double> w{1.0L};
  for (int n = 3; n < count; ++n) {
    const int m = n - 3;
    if (m > 0) {
      long double acc = 0;
      for (int k = 1; k <= m; ++k) acc += (2.5L * k - m) * c[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(m - k)];
      w.push_back(acc / (m * c[0]));
    }
    const long double half = n / 2.0L;
    c[static_cast<std::size_t>(n)] = w[static_cast<std::size_t>(m)] / (half * (half - 1));
  }
  c.resize(static_cast<std::size_t>(count));
  return c;
}

std::pair<long double, long double> small_x_state(long double slope, long double x0) {
  if (!(x0 > 0 && x0 <= 1e-4L)) throw DomainError("small_x_state needs 0 < x0 <= 1e-4");
  const auto c = singular_expansion(slope, kExpansionTerms);
  const long double s = std::sqrt(x0);
  long double u = 0, du = 0;
  for (std::size_t n = c.size(); n-- > 0;) u = u * s + c[n];
  // u' = sum c_n (n/2) s^(n-2), n >= 2.
  for (std::size_t n = c.size(); n-- > 2;) du = du * s + c[n] * (static_cast<long double>(n) / 2);
  return {u, du};
}

ShotOutcome integrate_shot(long double slope, const ShootingConfig& cfg) {
  std::optional<ShotOutcome> outcome;
  State last{};
  integrate(
      slope, cfg, {},
      [&](long double x, const State& y) {
        last = y;
        if (y[0] <= 0) {
          outcome = CrossedZero{x};
          return false;
        }
        if (y[1] >= 0) {
          outcome = TurnedUpward{x};
          return false;
        }
        return true;
      },
      [](long double, const State&) {});
  if (outcome) return *outcome;
  return ReachedFarBoundary{last[0], last[1]};
}

ShootingResult find_initial_slope(const ShootingConfig& cfg) {
  cfg.validate();
  long double lo = cfg.bracket_lo, hi = cfg.bracket_hi;
  const SlopeSide lo_side = classify(integrate_shot(lo, cfg), cfg.x_max);
  const SlopeSide hi_side = classify(integrate_shot(hi, cfg), cfg.x_max);
  if (lo_side == hi_side)
    throw BracketError("both bracket endpoints lie " + std::string(lo_side == SlopeSide::Below ? "below" : "above") +
                       " the critical slope");
  ShootingResult result;
  result.config = cfg;
  while (hi - lo > cfg.bracket_tol) {
    const long double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (classify(integrate_shot(mid, cfg), cfg.x_max) == lo_side)
      lo = mid;
    else
      hi = mid;
    ++result.iterations;
  }
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.slope = lo + (hi - lo) / 2;

  result.samples.emplace_back(cfg.x_start, small_x_state(result.slope, cfg.x_start).first);
  integrate(
      result.slope, cfg, {},
      [&](long double x, const State& y) {
        if (y[0] <= 0 || y[1] >= 0) return false;
        if (y[0] >= result.samples.back().second) return false;
        result.samples.emplace_back(x, y[0]);
        return true;
      },
      [](long double, const State&) {});
  return result;
}

std::vector<SolutionSample> sample_states(const ShootingResult& result, const std::vector<long double>& grid) {
  const auto& cfg = result.config;
  for (long double x : grid) {
    if (x < 0) throw RangeError("sample grid point " + std::to_string(static_cast<double>(x)) + " is negative");
    if (x > cfg.x_max)
      throw RangeError("sample grid point " + std::to_string(static_cast<double>(x)) + " lies beyond x_max");
  }
  std::vector<long double> stops;
  for (long double x : grid)
    if (x > cfg.x_start) stops.push_back(x);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  std::vector<SolutionSample> reached;
  if (!stops.empty()) {
    integrate(
        result.slope, cfg, stops, [&](long double x, const State&) { return x < stops.back(); },
        [&](long double x, const State& y) { reached.push_back({x, y[0], y[1]}); });
    if (reached.size() != stops.size()) throw IntegrationError("trajectory ended before the last grid point", stops.back());
  }

  std::vector<SolutionSample> out;
  out.reserve(grid.size());
  for (long double x : grid) {
    if (x == 0) {
      out.push_back({0, 1, result.slope});
    } else if (x <= cfg.x_start) {
      auto [u, du] = small_x_state(result.slope, x);
      out.push_back({x, u, du});
    } else {
      auto it = std::lower_bound(stops.begin(), stops.end(), x);
      out.push_back(reached[static_cast<std::size_t>(it - stops.begin())]);
    }
  }
  return out;
}

std::vector<std::pair<long double, long double>> sample_solution(const ShootingResult& result,
                                                                 const std::vector<long double>& grid) {
  std::vector<std::pair<long double, long double>> out;
  for (const auto& s : sample_states(result, grid)) out.emplace_back(s.x, s.u);
  return out;
}

} // namespace tfham
