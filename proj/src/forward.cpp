#include "invset/forward.hpp"

#include "invset/backward.hpp"
#include "invset/flow.hpp"
#include "invset/hausdorff.hpp"
#include "invset/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace invset {

namespace {

std::string time_label(double t) {
  const double rounded = std::round(t);
  if (std::abs(t - rounded) < 1e-12) return "M_" + std::to_string(static_cast<long>(rounded));
  return "M_t";
}

void require_flat(const SampledManifold& m0) {
  if (m0.time != 0.0 || (m0.q.size() > 0 && m0.q.cwiseAbs().maxCoeff() != 0.0))
    throw StructuralError("expected a flat manifold at time 0");
}

}  // namespace

SampledManifold evolve_manifold(const SpectralProblem& problem, const SampledManifold& m0, double t,
                                double h, int jobs) {
  require_flat(m0);
  if (m0.p.rows() != problem.p_dim() || m0.q.rows() != problem.q_dim())
    throw StructuralError("manifold dimensions do not match the problem");
  SampledManifold out = m0;
  out.label = time_label(t);
  out.time = t;
  out.grid.h = h;
  out.problem_hash = problem.hash();
  const Eigen::Index n = problem.p_dim();
  parallel_for(static_cast<std::size_t>(m0.size()), jobs, [&](std::size_t k) {
    const auto col = static_cast<Eigen::Index>(k);
    Vector u = Vector::Zero(problem.dim());
    u.head(n) = m0.p.col(col);
    const Vector end = flow_map(problem, u, t, h);
    out.p.col(col) = end.head(n);
    out.q.col(col) = end.tail(problem.q_dim());
  });
  return out;
}

AnchoredSample anchor_manifold(const SpectralProblem& problem, const SampledManifold& m0, int n,
                               double h, Matrix& preimages, const AnchorOptions& options) {
  require_flat(m0);
  const Eigen::Index dim = problem.p_dim();
  const Eigen::Index count = m0.size();
  const bool warm = preimages.rows() == dim && preimages.cols() == count;
  Matrix solved(dim, count);
  SampledManifold out = m0;
  out.label = "M_" + std::to_string(n);
  out.time = static_cast<double>(n);
  out.grid.h = h;
  out.problem_hash = problem.hash();
  std::vector<double> residual(static_cast<std::size_t>(count), 0.0);
  std::vector<char> ok(static_cast<std::size_t>(count), 1);

  ShootingOptions shoot_opts;
  shoot_opts.tol = options.tol;
  shoot_opts.keep_trajectory = false;
  shoot_opts.polish = true;
  parallel_for(static_cast<std::size_t>(count), options.jobs, [&](std::size_t k) {
    const auto col = static_cast<Eigen::Index>(k);
    const Vector target = m0.p.col(col);
    Vector guess = warm ? Vector(preimages.col(col)) : linear_preimage(problem, target, n);
    if (warm) {
      for (Eigen::Index i = 0; i < dim; ++i)
        guess(i) *= std::exp(std::min(problem.eigenvalues()(i), 600.0));
    }
    const ShootingResult r = shoot(problem, target, n, guess, h, shoot_opts);
    solved.col(col) = r.p_minus_n;
    out.q.col(col) = r.endpoint.tail(problem.q_dim());
    residual[k] = r.residual;
    ok[k] = r.converged ? 1 : 0;
  });
  preimages = solved;
  AnchoredSample sample{std::move(out), 0, 0.0};
  for (std::size_t k = 0; k < ok.size(); ++k) {
    if (!ok[k]) ++sample.unresolved;
    sample.max_residual = std::max(sample.max_residual, residual[k]);
  }
  return sample;
}

LimitResult manifold_limit(const SpectralProblem& problem, const SampledManifold& grid, int n_max,
                           double h, double tol, LimitSampling sampling, int jobs) {
  if (n_max < 2) throw DomainError("manifold_limit needs n_max >= 2");
  require_flat(grid);
  LimitResult result;
  result.sequence.reserve(static_cast<std::size_t>(n_max));

  Matrix preimages;
  AnchorOptions anchor_opts;
  anchor_opts.jobs = jobs;
  SampledManifold current = grid;
  for (int n = 1; n <= n_max; ++n) {
    if (sampling == LimitSampling::anchored) {
      AnchoredSample sample = anchor_manifold(problem, grid, n, h, preimages, anchor_opts);
      result.unresolved_nodes += sample.unresolved;
      result.sequence.push_back(std::move(sample.manifold));
    } else {
      // M_n = S(1) M_{n-1}: the same steps as a single run from time 0.
      if (n == 1) {
        current = evolve_manifold(problem, grid, 1.0, h, jobs);
      } else {
        const Eigen::Index pd = problem.p_dim();
        SampledManifold next = current;
        parallel_for(static_cast<std::size_t>(current.size()), jobs, [&](std::size_t k) {
          const auto col = static_cast<Eigen::Index>(k);
          Vector u(problem.dim());
          u.head(pd) = current.p.col(col);
          u.tail(problem.q_dim()) = current.q.col(col);
          const Vector end = flow_map(problem, u, 1.0, h);
          next.p.col(col) = end.head(pd);
          next.q.col(col) = end.tail(problem.q_dim());
        });
        next.time = static_cast<double>(n);
        next.label = "M_" + std::to_string(n);
        current = std::move(next);
      }
      result.sequence.push_back(current);
    }
  }

  std::vector<Matrix> sections;
  sections.reserve(result.sequence.size());
  for (const auto& m : result.sequence) sections.push_back(q_section(m));
  const RateConstants constants = rate_constants(problem);
  if (sections.size() >= 4) {
    result.report = cauchy_rate(sections, constants, tol, h);
  } else {
    // Too short for a fit; still record the distances.
    result.report.theoretical_rate = constants.rate;
    result.report.prefactor = constants.cauchy_prefactor();
    for (std::size_t i = 0; i + 1 < sections.size(); ++i) {
      result.report.indices.push_back(static_cast<int>(i) + 1);
      result.report.distances.push_back(hausdorff(sections[i + 1], sections[i]));
    }
  }

  result.n_star = n_max;
  for (std::size_t i = 0; i < result.report.distances.size(); ++i) {
    if (result.report.distances[i] < tol) {
      result.n_star = result.report.indices[i];
      result.converged = true;
      break;
    }
  }
  result.report.converged = result.converged;
  result.limit = result.sequence[static_cast<std::size_t>(result.n_star - 1)];
  result.limit.label = "M_inf";
  result.limit.is_limit = true;
  return result;
}

LipschitzEstimate lipschitz_estimate(const SampledManifold& m) {
  LipschitzEstimate est;
  std::unordered_map<Eigen::Index, Eigen::Index> column_of;
  for (Eigen::Index c = 0; c < m.size(); ++c) {
    const bool first_branch = m.branch_id.empty() || m.branch_id[static_cast<std::size_t>(c)] == 0;
    const Eigen::Index node = m.node.empty() ? c : m.node[static_cast<std::size_t>(c)];
    if (first_branch) column_of.emplace(node, c);
  }
  int pairs = 0;
  for (const auto& [node, col] : column_of) {
    auto multi = m.grid.multi_index(node);
    for (std::size_t a = 0; a < multi.size(); ++a) {
      if (multi[a] + 1 >= m.grid.resolution[a]) continue;
      ++multi[a];
      const auto it = column_of.find(m.grid.flat_index(multi));
      --multi[a];
      if (it == column_of.end()) continue;
      ++pairs;
      const double dp = (m.p.col(col) - m.p.col(it->second)).norm();
      if (dp < 1e-9) {
        ++est.excluded_pairs;
        est.fold = true;
        continue;
      }
      est.value = std::max(est.value, (m.q.col(col) - m.q.col(it->second)).norm() / dp);
    }
  }
  est.degenerate = pairs > 0 && est.excluded_pairs == pairs;
  return est;
}

ForwardInvariantReport check_forward_invariants(const SpectralProblem& problem,
                                                const SampledManifold& m, double slack) {
  ForwardInvariantReport r;
  r.q_bound = problem.k0() / problem.lambda_n1();
  for (Eigen::Index c = 0; c < m.size(); ++c) {
    const double qn = m.q.col(c).norm();
    r.q_max = std::max(r.q_max, qn);
    if (m.p.col(c).norm() > problem.r_trunc()) r.exterior_q_max = std::max(r.exterior_q_max, qn);
  }
  r.exterior_flat = r.exterior_q_max <= slack;
  r.section_bounded = r.q_max <= r.q_bound + slack;
  return r;
}

}  // namespace invset
