#include "invset/backward.hpp"

#include "invset/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace invset {

namespace {

Vector clip_to_ball(Vector p, double radius) {
  const double norm = p.norm();
  if (norm > radius) p *= radius / norm;
  return p;
}

struct NewtonOutcome {
  Vector p;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Residual of the shooting equation; nonfinite endpoints count as +inf.
double residual_at(const SpectralProblem& problem, const Vector& p, const Vector& p0, int n, double h,
                   Vector& f) {
  try {
    f = shooting_map(problem, p, n, h) - p0;
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const NumericError&) {
    return std::numeric_limits<double>::infinity();
  }
  return f.norm();
}

NewtonOutcome newton(const SpectralProblem& problem, const Vector& p0, int n, const Vector& guess,
                     double h, double tol, int max_iter, bool polish) {
  const double radius = shooting_ball_radius(problem, p0, n);
  const Eigen::Index dim = problem.p_dim();
  NewtonOutcome out;
  out.p = clip_to_ball(guess, radius);
  Vector f;
  out.residual = residual_at(problem, out.p, p0, n, h, f);
  if (!std::isfinite(out.residual)) return out;

  for (int it = 0; it < max_iter; ++it) {
    const bool within = out.residual <= tol;
    if (within && !polish) {
      out.converged = true;
      return out;
    }
    Matrix jac(dim, dim);
    const double delta = 1e-6 * (1.0 + out.p.norm());
    for (Eigen::Index j = 0; j < dim; ++j) {
      Vector shifted = out.p;
      shifted(j) += delta;
      jac.col(j) = (shooting_map(problem, shifted, n, h) - p0 - f) / delta;
    }
    const Eigen::FullPivLU<Matrix> lu(jac);
    if (!lu.isInvertible()) break;
    const Vector dp = -lu.solve(f);

    bool improved = false;
    double scale = 1.0;
    // Once within tol, polishing takes full steps only and stops at the roundoff floor.
    const int searches = within ? 1 : 16;
    const double accept = within ? 0.5 * out.residual : out.residual;
    for (int ls = 0; ls < searches; ++ls, scale *= 0.5) {
      const Vector trial = clip_to_ball(out.p + scale * dp, radius);
      Vector f_trial;
      const double r_trial = residual_at(problem, trial, p0, n, h, f_trial);
      if (r_trial < accept) {
        out.p = trial;
        f = f_trial;
        out.residual = r_trial;
        improved = true;
        break;
      }
    }
    ++out.iterations;
    if (!improved) break;
  }
  out.converged = out.residual <= tol;
  return out;
}

Vector p_growth(const SpectralProblem& problem, const Vector& p, double t) {
  Vector out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    out(i) = p(i) * std::exp(std::min(problem.eigenvalues()(i) * t, 600.0));
  return out;
}

}  // namespace

double shooting_ball_radius(const SpectralProblem& problem, const Vector& p0, int n) {
  return 2.0 * std::exp(static_cast<double>(n) * problem.lambda_n()) *
         (problem.r_trunc() + p0.norm());
}

Vector shooting_map(const SpectralProblem& problem, const Vector& p_init, int n, double h) {
  if (n < 1) throw DomainError("shooting horizon must be at least 1");
  if (p_init.size() != problem.p_dim()) throw StructuralError("p has the wrong dimension");
  Vector u = Vector::Zero(problem.dim());
  u.head(problem.p_dim()) = p_init;
  const Vector end = flow_map(problem, u, static_cast<double>(n), h);
  if (!end.allFinite()) throw DomainError("shooting map overflowed; start outside the ball");
  return end.head(problem.p_dim());
}

Vector linear_preimage(const SpectralProblem& problem, const Vector& p0, int n) {
  return clip_to_ball(p_growth(problem, p0, static_cast<double>(n)),
                      shooting_ball_radius(problem, p0, n));
}

ShootingResult shoot(const SpectralProblem& problem, const Vector& p0, int n, const Vector& guess,
                     double h, const ShootingOptions& options) {
  if (n < 1) throw DomainError("shooting horizon must be at least 1");
  if (p0.size() != problem.p_dim() || guess.size() != problem.p_dim())
    throw StructuralError("p has the wrong dimension");

  ShootingResult result;
  result.horizon_n = n;
  result.p0_target = p0;

  NewtonOutcome best =
      newton(problem, p0, n, guess, h, options.tol, options.max_newton, options.polish);
  int iterations = best.iterations;
  if (!best.converged && options.continuation) {
    result.used_continuation = true;
    Vector warm = linear_preimage(problem, p0, 1);
    NewtonOutcome stage;
    for (int k = 1; k <= n; ++k) {
      stage = newton(problem, p0, k, warm, h, options.tol, options.max_newton,
                     options.polish && k == n);
      iterations += stage.iterations;
      if (!stage.converged) break;
      warm = p_growth(problem, stage.p, 1.0);
    }
    // A stage that stopped short of n solved a different problem.
    if (stage.converged) best = stage;
  }

  result.p_minus_n = best.p;
  result.residual = best.residual;
  result.converged = best.converged;
  result.newton_iterations = iterations;

  Vector u0 = Vector::Zero(problem.dim());
  u0.head(problem.p_dim()) = best.p;
  if (options.keep_trajectory) {
    result.trajectory = integrate(problem, u0, static_cast<double>(n), h);
    for (double& t : result.trajectory.times) t -= static_cast<double>(n);
    result.trajectory.times.back() = 0.0;
    result.endpoint = result.trajectory.states.back();
  } else {
    result.endpoint = flow_map(problem, u0, static_cast<double>(n), h);
  }
  return result;
}

PhiValue phi(const SpectralProblem& problem, const Vector& p0, const PhiOptions& options) {
  if (options.n_max < 2) throw DomainError("phi needs n_max >= 2");
  if (options.n_starts < 1) throw DomainError("phi needs at least one start");
  if (p0.size() != problem.p_dim()) throw StructuralError("p0 has the wrong dimension");
  const double cluster_tol = options.cluster_tol < 0.0 ? 1e3 * options.h : options.cluster_tol;
  const Eigen::Index dim = problem.p_dim();
  const Eigen::Index qd = problem.q_dim();

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double core_radius = 2.0 * (problem.r_trunc() + p0.norm());
  auto random_start = [&] {
    Vector d(dim);
    for (Eigen::Index i = 0; i < dim; ++i) d(i) = normal(rng);
    const double r = core_radius * std::pow(uniform(rng), 1.0 / static_cast<double>(dim));
    return Vector(r * d / d.norm());
  };

  PhiValue value;
  value.p0 = p0;
  ShootingOptions warm_opts;
  warm_opts.tol = options.shoot_tol;
  warm_opts.keep_trajectory = false;
  ShootingOptions cold_opts = warm_opts;
  cold_opts.continuation = false;

  for (int n = 1; n <= options.n_max; ++n) {
    struct Candidate {
      Vector q;
      Vector p;
      double residual;
    };
    std::vector<Candidate> found;
    auto record = [&](const ShootingResult& r) {
      if (!r.converged) {
        ++value.failed_starts;
        return;
      }
      const Vector q = r.endpoint.tail(qd);
      for (const auto& c : found) {
        if ((c.q - q).norm() <= cluster_tol) return;
      }
      found.push_back({q, r.p_minus_n, r.residual});
    };

    if (value.branches.empty()) {
      record(shoot(problem, p0, n, linear_preimage(problem, p0, n), options.h, warm_opts));
    }
    for (const auto& b : value.branches) {
      if (b.converged) continue;
      record(shoot(problem, p0, n, p_growth(problem, b.p_minus_n, 1.0), options.h, warm_opts));
    }
    for (int s = 0; s < options.n_starts; ++s) record(shoot(problem, p0, n, random_start(), options.h, cold_opts));

    if (found.empty()) {
      value.partial = true;
      continue;
    }
    value.horizon_used = n;

    for (const auto& c : found) {
      PhiBranch* match = nullptr;
      double best = cluster_tol;
      for (auto& b : value.branches) {
        const double d = (b.q0 - c.q).norm();
        if (d <= best) {
          best = d;
          match = &b;
        }
      }
      if (match == nullptr) {
        PhiBranch b;
        b.q0 = c.q;
        b.p_minus_n = c.p;
        b.residual = c.residual;
        b.horizon = n;
        b.horizons.push_back(n);
        value.branches.push_back(std::move(b));
      } else if (!match->converged && match->horizon < n) {
        const double inc = (c.q - match->q0).norm();
        match->increments.push_back(inc);
        match->horizons.push_back(n);
        match->q0 = c.q;
        match->p_minus_n = c.p;
        match->residual = c.residual;
        match->horizon = n;
        match->converged = inc < options.tol;
      }
    }
    const bool all_done = std::all_of(value.branches.begin(), value.branches.end(),
                                      [](const PhiBranch& b) { return b.converged; });
    if (all_done) break;
  }
  return value;
}

PhiGraph phi_graph(const SpectralProblem& problem, const GridMeta& grid, const PhiOptions& options,
                   int jobs) {
  if (grid.dims() != problem.p_dim()) throw StructuralError("grid dimension differs from N");
  const Eigen::Index count = grid.node_count();
  PhiGraph out;
  out.values.resize(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), jobs, [&](std::size_t k) {
    PhiOptions node_opts = options;
    node_opts.seed = options.seed + k;
    out.values[k] = phi(problem, grid.node(static_cast<Eigen::Index>(k)), node_opts);
  });

  Eigen::Index columns = 0;
  for (const auto& v : out.values) columns += static_cast<Eigen::Index>(v.branches.size());
  SampledManifold& g = out.graph;
  g.label = "graph_Phi";
  g.is_limit = true;
  g.grid = grid;
  g.grid.h = options.h;
  g.problem_hash = problem.hash();
  g.p.resize(problem.p_dim(), columns);
  g.q.resize(problem.q_dim(), columns);
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const auto& v = out.values[k];
    for (std::size_t b = 0; b < v.branches.size(); ++b, ++col) {
      g.p.col(col) = v.p0;
      g.q.col(col) = v.branches[b].q0;
      g.node.push_back(static_cast<Eigen::Index>(k));
      g.branch_id.push_back(static_cast<int>(b));
    }
  }
  return out;
}

BackwardBoundsReport check_backward_bounds(const SpectralProblem& problem,
                                           const ShootingResult& result, double slack) {
  if (result.trajectory.states.empty())
    throw StructuralError("backward bounds need the shooting trajectory");
  const Eigen::Index n = problem.p_dim();
  const Eigen::Index qd = problem.q_dim();
  const double k0 = problem.k0();
  const double lambda_n = problem.lambda_n();
  const double lambda_n1 = problem.lambda_n1();
  const double p0_norm = result.p0_target.norm();
  const Vector sqrt_lambda = problem.eigenvalues().tail(qd).cwiseSqrt();
  const double q_bound = k0 / lambda_n1;
  const double a_half_bound = std::numbers::sqrt2 * k0 / std::sqrt(lambda_n1);

  BackwardBoundsReport report;
  report.p_margin = report.q_margin = report.a_half_margin = std::numeric_limits<double>::infinity();
  const auto& traj = result.trajectory;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double t = traj.times[i];
    const Vector& u = traj.states[i];
    const double p_bound = (p0_norm + k0 / lambda_n) * std::exp(-lambda_n * t);
    const double q_norm = u.tail(qd).norm();
    const double a_half = sqrt_lambda.cwiseProduct(u.tail(qd)).norm();
    report.p_margin = std::min(report.p_margin, p_bound - u.head(n).norm());
    report.q_margin = std::min(report.q_margin, q_bound - q_norm);
    report.a_half_margin = std::min(report.a_half_margin, a_half_bound - a_half);
    report.q_sup = std::max(report.q_sup, q_norm);
    report.a_half_q_sup = std::max(report.a_half_q_sup, a_half);
  }
  report.passed = report.p_margin >= -slack && report.q_margin >= -slack &&
                  report.a_half_margin >= -slack;
  return report;
}

}  // namespace invset
