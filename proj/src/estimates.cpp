#include "invset/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace invset {

std::pair<double, double> alpha_beta(double lambda1, double lambda_n1, double k1) {
  if (!(lambda1 > 0.0) || !(lambda_n1 > lambda1) || !(k1 >= 0.0))
    throw DomainError("alpha_beta requires 0 < lambda_1 < lambda_{N+1} and K1 >= 0");
  const double delta = lambda_n1 - lambda1;
  const double root = std::hypot(delta, 2.0 * k1);
  // alpha = (-delta + root) / 2 rewritten without cancellation.
  const double alpha = 2.0 * k1 * k1 / (delta + root);
  const double beta = 0.5 * (delta + root);
  return {alpha, beta};
}

RateConstants rate_constants(const SpectralProblem& problem) {
  RateConstants c;
  c.lambda1 = problem.lambda1();
  c.lambda_n = problem.lambda_n();
  c.lambda_n1 = problem.lambda_n1();
  c.k0 = problem.k0();
  c.k1 = problem.k1();
  c.gap_delta = c.lambda_n1 - c.lambda1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!(c.gap_delta > 0.0)) {
    // lambda_1 == lambda_{N+1}: no gap at all, nothing is defined.
    c.alpha = c.beta = c.k2 = c.k3 = c.k4 = c.k5 = nan;
    c.rate = nan;
    return c;
  }
  std::tie(c.alpha, c.beta) = alpha_beta(c.lambda1, c.lambda_n1, c.k1);
  c.k2 = 2.0;  // 1 + K1^2 / (alpha beta) with alpha beta = K1^2
  c.rate = c.lambda_n1 - c.k1 - c.alpha;
  c.rate_positive = c.rate > 0.0;
  const double d = c.gap_delta;
  c.k3_denominator_valid = d - c.alpha > 0.0;
  if (c.k3_denominator_valid) {
    c.k3 = c.k1 / d + c.k1 * c.k1 / (d * (d + c.beta) * (d - c.alpha));
    c.k4 = c.k1 * c.k3;
    c.k5 = c.k1 * c.k2 / (d - c.alpha);
  } else {
    c.k3 = c.k4 = c.k5 = nan;
  }
  return c;
}

namespace {

std::size_t time_index(const Trajectory& traj, double t) {
  const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t - 1e-9 * traj.step);
  if (it == traj.times.end() || std::abs(*it - t) > 1e-9 * traj.step)
    throw StructuralError("time " + std::to_string(t) + " is not a sample of the trajectory");
  return static_cast<std::size_t>(it - traj.times.begin());
}

}  // namespace

SigmaRhoReport verify_sigma_rho(const SpectralProblem& problem, const Trajectory& u_traj,
                                const Trajectory& v_traj, double t0, double t, double slack) {
  if (u_traj.times.size() != v_traj.times.size() || u_traj.states.size() != u_traj.times.size() ||
      v_traj.states.size() != v_traj.times.size())
    throw StructuralError("trajectories have different lengths");
  for (std::size_t i = 0; i < u_traj.times.size(); ++i) {
    if (u_traj.times[i] != v_traj.times[i]) throw StructuralError("trajectory time grids differ");
  }
  if (!(t0 <= t)) throw StructuralError("need t0 <= t");
  const std::size_t i0 = time_index(u_traj, t0);
  const std::size_t i1 = time_index(u_traj, t);

  const RateConstants c = rate_constants(problem);
  SigmaRhoReport report;
  if (!c.k3_denominator_valid) {
    report.skipped = true;
    return report;
  }

  const Eigen::Index n = problem.p_dim();
  const Eigen::Index qd = problem.q_dim();
  auto rho_at = [&](std::size_t i) {
    return (u_traj.states[i].head(n) - v_traj.states[i].head(n)).norm();
  };
  auto sigma_at = [&](std::size_t i) {
    return (u_traj.states[i].tail(qd) - v_traj.states[i].tail(qd)).norm();
  };
  report.rho0 = rho_at(i0);
  report.sigma0 = sigma_at(i0);
  report.sigma_margin = std::numeric_limits<double>::infinity();
  report.rho_margin = std::numeric_limits<double>::infinity();

  for (std::size_t i = i0; i <= i1; ++i) {
    const double tau = u_traj.times[i] - u_traj.times[i0];
    const double growth = std::exp((c.k1 - c.lambda1) * tau);
    const double sigma_bound =
        c.k3 * report.rho0 * growth + c.k2 * report.sigma0 * std::exp(-c.rate * tau);
    const double rho_bound =
        report.rho0 * (1.0 + c.k4 * tau) * growth + c.k5 * report.sigma0 * growth;
    const double sigma = sigma_at(i);
    const double rho = rho_at(i);

    report.sigma_margin = std::min(report.sigma_margin, sigma_bound + slack - sigma);
    report.rho_margin = std::min(report.rho_margin, rho_bound + slack - rho);
    if (sigma_bound > 0.0) report.sigma_ratio = std::max(report.sigma_ratio, sigma / sigma_bound);
    if (rho_bound > 0.0) report.rho_ratio = std::max(report.rho_ratio, rho / rho_bound);
    if (sigma > sigma_bound + slack) ++report.sigma_violations;
    if (rho > rho_bound + slack) ++report.rho_violations;
    ++report.checked_times;
  }
  report.passed = report.sigma_violations == 0 && report.rho_violations == 0;
  return report;
}

}  // namespace invset
