#pragma once

#include "invset/core.hpp"
#include "invset/flow.hpp"
#include "invset/manifold.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace invset {

/// Solution of the horizon-n boundary value problem
///
///   p' + Ap = PF(p + q),  q' + Aq = QF(p + q),  q(-n) = 0,  p(0) = p0,
///
/// integrated forward from (p_minus_n, 0) and re-indexed to [-n, 0].
struct ShootingResult {
  int horizon_n = 0;
  Vector p0_target;
  Vector p_minus_n;
  double residual = 0.0;
  bool converged = false;
  int newton_iterations = 0;
  bool used_continuation = false;
  int branch_id = 0;
  Vector endpoint;        // full state at time 0
  Trajectory trajectory;  // times in [-n, 0]; empty unless requested
};

struct ShootingOptions {
  double tol = 1e-10;
  int max_newton = 40;
  bool continuation = true;
  bool keep_trajectory = true;
  bool polish = false;  // keep taking Newton steps after tol while the residual halves
};

/// Radius 2 e^{n lambda_N} (R + |p0|) of the ball that contains a solution.
double shooting_ball_radius(const SpectralProblem& problem, const Vector& p0, int n);

/// P-part of the time-n state reached from (p_init, 0).
Vector shooting_map(const SpectralProblem& problem, const Vector& p_init, int n, double h);

/// Newton on p |-> shooting_map(p, n) - p0 with a finite-difference Jacobian
/// (perturbation 1e-6 (1 + |p|)) and backtracking. Iterates are kept inside
/// the ball of shooting_ball_radius. On stagnation it falls back to
/// continuation in the horizon: solve n' = 1, warm-start n' + 1 from
/// e^{A_P} p_{-n'}, and so on up to n.
ShootingResult shoot(const SpectralProblem& problem, const Vector& p0, int n, const Vector& guess,
                     double h, const ShootingOptions& options = {});

/// Linear backward guess e^{A_P n} p0, clipped to the shooting ball.
Vector linear_preimage(const SpectralProblem& problem, const Vector& p0, int n);

struct PhiBranch {
  Vector q0;
  Vector p_minus_n;
  std::vector<double> increments;  // |q_{n+1}(0) - q_n(0)| per horizon step
  std::vector<int> horizons;       // horizons at which the branch was found
  double residual = 0.0;
  bool converged = false;          // last increment below tol
  int horizon = 0;
};

struct PhiValue {
  Vector p0;
  std::vector<PhiBranch> branches;
  int horizon_used = 0;
  bool partial = false;  // some horizon had no converged start at all
  int failed_starts = 0;
};

struct PhiOptions {
  int n_max = 6;
  int n_starts = 8;
  std::uint64_t seed = 1;
  double h = 1e-3;
  double tol = 1e-8;
  double cluster_tol = -1.0;  // negative: 1e3 h
  double shoot_tol = 1e-11;
};

/// Set-valued map Phi(p0) via multistart shooting over horizons 1..n_max.
///
/// For every horizon the warm starts of the known branches and n_starts
/// seeded guesses from |p| <= 2 (R + |p0|) are shot; endpoint q-values are
/// clustered and each branch stops once its Cauchy increment drops below tol.
PhiValue phi(const SpectralProblem& problem, const Vector& p0, const PhiOptions& options);

/// Samples Phi at every node of a p-grid; the result is labeled "graph_Phi",
/// with one column per (node, branch).
struct PhiGraph {
  SampledManifold graph;
  std::vector<PhiValue> values;
};
PhiGraph phi_graph(const SpectralProblem& problem, const GridMeta& grid, const PhiOptions& options,
                   int jobs = 1);

struct BackwardBoundsReport {
  double p_margin = 0.0;      // min over t of (|p0| + K0/lambda_N) e^{-lambda_N t} - |p(t)|
  double q_margin = 0.0;      // min over t of K0/lambda_{N+1} - |q(t)|
  double a_half_margin = 0.0; // min over t of sqrt(2) K0 / sqrt(lambda_{N+1}) - |A^{1/2} q(t)|
  double q_sup = 0.0;
  double a_half_q_sup = 0.0;  // measured sup |A^{1/2} q(t)|
  bool passed = true;
};

/// A priori bounds along a converged trajectory on [-n, 0]; passes when
/// every margin is >= -slack.
BackwardBoundsReport check_backward_bounds(const SpectralProblem& problem,
                                           const ShootingResult& result, double slack);

}  // namespace invset
