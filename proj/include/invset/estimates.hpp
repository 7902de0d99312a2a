#pragma once

#include "invset/core.hpp"
#include "invset/flow.hpp"

#include <utility>

namespace invset {

/// Constants of the two-mode comparison estimates for a pair of solutions.
///
/// alpha and beta are the positive root and the negated negative root of
/// x^2 + gap_delta x - k1^2 = 0 with gap_delta = lambda_{N+1} - lambda_1.
/// k2 multiplies the decaying |sigma(t0)| term and k3 the growing |rho(t0)|
/// term of the sigma estimate; k4 and k5 enter the rho estimate. k3, k4, k5
/// are NaN when gap_delta - alpha <= 0.
struct RateConstants {
  double lambda1 = 0.0;
  double lambda_n = 0.0;
  double lambda_n1 = 0.0;
  double k0 = 0.0;
  double k1 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double k5 = 0.0;
  double rate = 0.0;  // lambda_{N+1} - k1 - alpha
  double gap_delta = 0.0;
  bool rate_positive = false;
  bool k3_denominator_valid = false;

  /// K0 K2 / lambda_{N+1}, the prefactor of the Hausdorff-Cauchy bound.
  double cauchy_prefactor() const { return k0 * k2 / lambda_n1; }
};

/// (alpha, beta) for the given spectral data; throws DomainError unless
/// 0 < lambda1 < lambda_n1 and k1 >= 0.
std::pair<double, double> alpha_beta(double lambda1, double lambda_n1, double k1);

RateConstants rate_constants(const SpectralProblem& problem);

struct SigmaRhoReport {
  bool skipped = false;  // k3 denominator invalid: nothing was checked
  bool passed = true;
  int sigma_violations = 0;
  int rho_violations = 0;
  double sigma_margin = 0.0;  // min over checked times of bound + slack - |sigma|
  double rho_margin = 0.0;
  double sigma_ratio = 0.0;   // max of |sigma| / bound
  double rho_ratio = 0.0;
  double rho0 = 0.0;
  double sigma0 = 0.0;
  int checked_times = 0;
};

/// Checks, at every sample time s in [t0, t],
///
///   |sigma(s)| <= K3 |rho(t0)| e^{(K1 - lambda_1)(s - t0)} + K2 |sigma(t0)| e^{-rate (s - t0)}
///   |rho(s)|   <= |rho(t0)| (1 + K4 (s - t0)) e^{(K1 - lambda_1)(s - t0)}
///                 + K5 |sigma(t0)| e^{(K1 - lambda_1)(s - t0)}
///
/// with rho = Pu - Pv and sigma = Qu - Qv, each up to an absolute `slack`.
SigmaRhoReport verify_sigma_rho(const SpectralProblem& problem, const Trajectory& u_traj,
                                const Trajectory& v_traj, double t0, double t, double slack);

}  // namespace invset
