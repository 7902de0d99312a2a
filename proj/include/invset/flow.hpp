#pragma once

#include "invset/core.hpp"

#include <vector>

namespace invset {

/// Uniformly sampled solution; the last step may be short so that
/// times.back() equals the requested final time.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  double step = 0.0;
};

/// One exponential-Euler step of fixed size h.
///
///   u_i <- exp(-lambda_i h) u_i + (1 - exp(-lambda_i h)) / lambda_i * F(u)_i
///
/// Exact on the linear part and for F constant along the step.
class ExponentialEuler {
 public:
  ExponentialEuler(const SpectralProblem& problem, double h);

  double h() const { return h_; }
  void advance(Vector& u) const;

 private:
  const SpectralProblem* problem_;
  double h_;
  Vector decay_;
  Vector gain_;
};

Vector step(const SpectralProblem& problem, const Vector& u, double h);

Trajectory integrate(const SpectralProblem& problem, const Vector& u0, double t_final, double h);

/// Endpoint of `integrate`; t = 0 returns u0.
Vector flow_map(const SpectralProblem& problem, const Vector& u0, double t, double h);

/// Number of full steps of size h in [0, t] and the length of a trailing
/// short step (0 when t is a multiple of h up to rounding).
std::pair<long, double> step_count(double t, double h);

}  // namespace invset
