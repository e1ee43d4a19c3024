#pragma once

// Numerical reference for u'' = sqrt(u^3 / x), u(0) = 1, u(inf) = 0, by
// shooting on the initial slope B from a singular-start series and bisecting
// on the classification of each trajectory.

#include <utility>
#include <variant>
#include <vector>

namespace tfham {

struct ShootingConfig {
  long double x_start = 1e-6L;
  long double x_max = 50.0L;
  long double ode_tol = 1e-12L;
  long double bracket_lo = -1.7L;
  long double bracket_hi = -1.5L;
  long double bracket_tol = 1e-12L;

  /// Throws ConfigError unless 0 < x_start <= 1e-4 < 1 < x_max, tolerances
  /// positive and bracket_lo < bracket_hi.
  void validate() const;
};

struct CrossedZero {
  long double x;
};
struct TurnedUpward {
  long double x;
};
struct ReachedFarBoundary {
  long double u;
  long double u_prime;
};

using ShotOutcome = std::variant<CrossedZero, TurnedUpward, ReachedFarBoundary>;

/// Which side of the critical slope a shot lies on. Below: the trajectory
/// falls too fast (B too negative). A far-boundary arrival is judged by the
/// sign of x u' + 3u, which vanishes on the critical 144/x^3 tail.
enum class SlopeSide { Below, Above };

SlopeSide classify(const ShotOutcome& outcome, long double x_max);

struct SolutionSample {
  long double x;
  long double u;
  long double u_prime;
};

struct ShootingResult {
  long double slope = 0;
  long double bracket_lo = 0;
  long double bracket_hi = 0;
  int iterations = 0;
  /// Accepted steps of the final shot while u > 0 and u' < 0.
  std::vector<std::pair<long double, long double>> samples;
  ShootingConfig config;
};

/// Coefficients c_n of u = sum c_n x^(n/2), n = 0..count-1, obtained by
/// substituting the series into u'' = x^(-1/2) u^(3/2): c_0 = 1, c_1 = 0,
/// c_2 = B, c_3 = 4/3, ...
std::vector<long double> singular_expansion(long double slope, int count);

/// (u, u') at x0 from the truncated singular expansion. DomainError unless
/// 0 < x0 <= 1e-4.
std::pair<long double, long double> small_x_state(long double slope, long double x0);

/// One shot. IntegrationError when the step size underflows.
ShotOutcome integrate_shot(long double slope, const ShootingConfig& cfg);

/// Bisection on the slope. BracketError when both endpoints fall on the same
/// side of the critical slope.
ShootingResult find_initial_slope(const ShootingConfig& cfg = {});

/// (x, u, u') on an ascending or unsorted grid within [0, x_max], by
/// re-integrating with the converged slope and stopping at each grid point.
/// x = 0 maps to (0, 1, slope). RangeError beyond x_max or for negative x.
std::vector<SolutionSample> sample_states(const ShootingResult& result, const std::vector<long double>& grid);

/// (x, u) pairs of sample_states.
std::vector<std::pair<long double, long double>> sample_solution(const ShootingResult& result,
                                                                 const std::vector<long double>& grid);

} // namespace tfham
