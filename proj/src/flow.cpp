#include "invset/flow.hpp"

#include <cmath>

namespace invset {

ExponentialEuler::ExponentialEuler(const SpectralProblem& problem, double h)
    : problem_(&problem), h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("step size must be positive");
  const Vector& lambda = problem.eigenvalues();
  decay_ = (-lambda.array() * h).exp().matrix();
  gain_.resize(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) gain_(i) = -std::expm1(-lambda(i) * h) / lambda(i);
}

void ExponentialEuler::advance(Vector& u) const {
  if (!u.allFinite()) throw NumericError("nonfinite state in exponential Euler step");
  const Vector f = eval_nonlinearity(*problem_, u);
  u = decay_.cwiseProduct(u) + gain_.cwiseProduct(f);
}

Vector step(const SpectralProblem& problem, const Vector& u, double h) {
  if (u.size() != problem.dim()) throw StructuralError("state dimension mismatch");
  Vector next = u;
  ExponentialEuler(problem, h).advance(next);
  return next;
}

std::pair<long, double> step_count(double t, double h) {
  if (!(h > 0.0)) throw DomainError("step size must be positive");
  if (t < 0.0) throw DomainError("time must be nonnegative");
  auto full = static_cast<long>(std::floor(t / h));
  if (static_cast<double>(full + 1) * h - t <= 1e-9 * h) ++full;
  double rest = t - static_cast<double>(full) * h;
  if (rest <= 1e-9 * h) rest = 0.0;
  return {full, rest};
}

Trajectory integrate(const SpectralProblem& problem, const Vector& u0, double t_final, double h) {
  if (!(t_final > 0.0)) throw DomainError("t_final must be positive");
  if (u0.size() != problem.dim()) throw StructuralError("state dimension mismatch");
  const auto [full, rest] = step_count(t_final, h);
  const ExponentialEuler stepper(problem, h);

  Trajectory traj;
  traj.step = h;
  traj.times.reserve(static_cast<std::size_t>(full) + 2);
  traj.states.reserve(static_cast<std::size_t>(full) + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  Vector u = u0;
  for (long k = 1; k <= full; ++k) {
    stepper.advance(u);
    traj.times.push_back(static_cast<double>(k) * h);
    traj.states.push_back(u);
  }
  if (rest > 0.0) {
    ExponentialEuler(problem, rest).advance(u);
    traj.times.push_back(t_final);
    traj.states.push_back(u);
  }
  traj.times.back() = t_final;
  return traj;
}

Vector flow_map(const SpectralProblem& problem, const Vector& u0, double t, double h) {
  if (u0.size() != problem.dim()) throw StructuralError("state dimension mismatch");
  if (t == 0.0) return u0;
  if (!(t > 0.0)) throw DomainError("flow time must be nonnegative");
  const auto [full, rest] = step_count(t, h);
  const ExponentialEuler stepper(problem, h);
  Vector u = u0;
  for (long k = 0; k < full; ++k) stepper.advance(u);
  if (rest > 0.0) ExponentialEuler(problem, rest).advance(u);
  return u;
}

}  // namespace invset
