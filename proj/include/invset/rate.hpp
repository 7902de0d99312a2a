#pragma once

#include "invset/core.hpp"
#include "invset/estimates.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace invset {

inline constexpr double kLogFloor = 1e-15;
inline constexpr double kCauchyBoundSlack = 3.0;

/// Distances d_n = d_H(section_{n+1}, section_n) with a log-linear fit.
struct RateReport {
  std::vector<int> indices;
  std::vector<double> distances;
  std::vector<double> bounds;         // slack * prefactor * e^{-rate n}
  std::vector<bool> floored;          // at or below the resolution floor
  std::optional<double> fitted_rate;  // negative slope of log d_n; needs >= 3 resolved points
  double fitted_intercept = 0.0;
  double theoretical_rate = 0.0;
  double prefactor = 0.0;
  double resolution_floor = kLogFloor;
  bool converged = false;
  int bound_violations = 0;
  std::pair<double, double> slack_band{0.5, 2.0};

  bool rate_in_band() const;
};

struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log(y) = intercept + slope x.
LogLinearFit fit_log_linear(const std::vector<double>& x, const std::vector<double>& y);

/// Hausdorff-Cauchy analysis of a sequence of Q-sections indexed n = 1, 2, ...
///
/// Distances at or below the resolution floor are flagged and left out of the
/// fit. The floor is max(1e-15, 4 eps max|q| A) with A = max(16, 1 / (1 -
/// e^{-lambda_{N+1} h})), the stationary roundoff gain of an exponential-Euler
/// step of size h on the slowest Q-mode (h = 0: A = 16). A distance counts as
/// a bound violation only if it exceeds both its bound and the floor.
/// `converged` is true when the last distance is below tol.
RateReport cauchy_rate(const std::vector<Matrix>& sections, const RateConstants& constants,
                       double tol, double h = 0.0);

}  // namespace invset
