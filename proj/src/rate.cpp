#include "invset/rate.hpp"

#include "invset/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace invset {

bool RateReport::rate_in_band() const {
  if (!fitted_rate || !(theoretical_rate > 0.0)) return false;
  return *fitted_rate >= slack_band.first * theoretical_rate &&
         *fitted_rate <= slack_band.second * theoretical_rate;
}

LogLinearFit fit_log_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("log-linear fit needs two points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) throw DomainError("log-linear fit needs positive values");
    sx += x[i];
    sy += std::log(y[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("log-linear fit needs distinct abscissae");
  LogLinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

RateReport cauchy_rate(const std::vector<Matrix>& sections, const RateConstants& constants,
                       double tol, double h) {
  if (sections.size() < 4) throw DomainError("cauchy_rate needs at least four sections");
  RateReport report;
  report.theoretical_rate = constants.rate;
  report.prefactor = constants.cauchy_prefactor();

  double scale = 0.0;
  for (const auto& s : sections) {
    if (s.size() > 0) scale = std::max(scale, s.cwiseAbs().maxCoeff());
  }
  double gain = 16.0;
  if (h > 0.0 && constants.lambda_n1 > 0.0)
    gain = std::max(gain, -1.0 / std::expm1(-constants.lambda_n1 * h));
  report.resolution_floor =
      std::max(kLogFloor, 4.0 * std::numeric_limits<double>::epsilon() * scale * gain);

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i + 1 < sections.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    const double d = hausdorff(sections[i + 1], sections[i]);
    const double bound =
        kCauchyBoundSlack * report.prefactor * std::exp(-constants.rate * static_cast<double>(n));
    const bool floored = !(d > report.resolution_floor);
    report.indices.push_back(n);
    report.distances.push_back(d);
    report.bounds.push_back(bound);
    report.floored.push_back(floored);
    // Below the floor a distance is zero at working precision.
    if (d > std::max(bound, report.resolution_floor)) ++report.bound_violations;
    if (!floored) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(d);
    }
  }
  if (xs.size() >= 3) {
    const LogLinearFit fit = fit_log_linear(xs, ys);
    report.fitted_rate = -fit.slope;
    report.fitted_intercept = fit.intercept;
  }
  report.converged = report.distances.back() < tol;
  return report;
}

}  // namespace invset
