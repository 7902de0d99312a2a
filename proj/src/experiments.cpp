#include "invset/experiments.hpp"

#include "invset/analysis.hpp"
#include "invset/backward.hpp"
#include "invset/estimates.hpp"
#include "invset/flow.hpp"
#include "invset/forward.hpp"
#include "invset/hausdorff.hpp"
#include "invset/parallel.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

namespace invset {

namespace {

struct Row {
  std::string check;
  std::string value;
  bool passed;
};

struct Context {
  const ExperimentConfig& config;
  const SpectralProblem problem;
  const RateConstants constants;
  std::filesystem::path out;
  int jobs;
  std::vector<Row> rows;
  std::optional<LimitResult> limit;
  std::optional<PhiGraph> graph;

  double slack() const { return 10.0 * config.h; }
  // Resolution tolerance for comparisons against the sampled graph.
  double graph_tol() const {
    return 2.0 * support_grid(problem.p_dim(), problem.r_trunc(), config.phi_grid).cell_diagonal() +
           slack();
  }
  void add(const std::string& check, double value, bool passed) {
    std::ostringstream v;
    v << std::setprecision(6) << value;
    rows.push_back({check, v.str(), passed});
  }
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream s;
  s << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

Vector uniform_in_ball(std::mt19937_64& rng, Eigen::Index dim, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = normal(rng);
  return radius * std::pow(uniform(rng), 1.0 / static_cast<double>(dim)) * d / d.norm();
}

PhiOptions phi_options(const ExperimentConfig& c) {
  PhiOptions o;
  o.n_max = c.phi_n_max;
  o.n_starts = c.phi_starts;
  o.seed = c.seed;
  o.h = c.h;
  o.tol = c.phi_tol;
  return o;
}

const LimitResult& ensure_limit(Context& ctx) {
  if (!ctx.limit) {
    const GridMeta g = support_grid(ctx.problem.p_dim(), ctx.problem.r_trunc(), ctx.config.grid);
    const SampledManifold m0 =
        sample_flat_manifold(g.lower, g.upper, g.resolution, ctx.problem.q_dim(), ctx.problem.r_trunc());
    ctx.limit = manifold_limit(ctx.problem, m0, ctx.config.n_max, ctx.config.h,
                               ctx.config.limit_tol, LimitSampling::anchored, ctx.jobs);
    write_manifold((ctx.out / "M_inf").string(), ctx.limit->limit);
  }
  return *ctx.limit;
}

const PhiGraph& ensure_graph(Context& ctx) {
  if (!ctx.graph) {
    const GridMeta g = support_grid(ctx.problem.p_dim(), ctx.problem.r_trunc(), ctx.config.phi_grid);
    ctx.graph = phi_graph(ctx.problem, g, phi_options(ctx.config), ctx.jobs);
    write_manifold((ctx.out / "graph_Phi").string(), ctx.graph->graph);
  }
  return *ctx.graph;
}

Json run_rates(Context& ctx) {
  const LimitResult& lr = ensure_limit(ctx);
  const RateReport& r = lr.report;
  Json j;
  j["report"] = to_json(r);
  j["n_star"] = lr.n_star;
  j["unresolved_nodes"] = lr.unresolved_nodes;
  const bool bounds_ok = r.bound_violations == 0;
  ctx.add("rates: distances within 3x Cauchy bound", r.bound_violations, bounds_ok);
  bool rate_ok = true;
  if (ctx.constants.rate_positive && r.fitted_rate) {
    rate_ok = r.rate_in_band();
    ctx.add("rates: fitted rate / theoretical", *r.fitted_rate / r.theoretical_rate, rate_ok);
  }
  j["rate_checked"] = ctx.constants.rate_positive && r.fitted_rate.has_value();
  const bool nodes_ok = lr.unresolved_nodes == 0;
  ctx.add("rates: unresolved anchored nodes", lr.unresolved_nodes, nodes_ok);

  const ForwardInvariantReport inv = check_forward_invariants(ctx.problem, lr.limit, ctx.slack());
  j["invariants"] = to_json(inv);
  ctx.add("rates: exterior q max", inv.exterior_q_max, inv.exterior_flat);
  ctx.add("rates: |q| max over K0/lambda_{N+1}", inv.q_max / std::max(inv.q_bound, 1e-300),
          inv.section_bounded);

  Json lips = Json::array();
  double lip_max = 0.0;
  for (const auto& m : lr.sequence) {
    const LipschitzEstimate e = lipschitz_estimate(m);
    lips.push_back(to_json(e));
    lip_max = std::max(lip_max, e.value);
  }
  j["lipschitz"] = lips;
  const bool lip_ok = std::isfinite(lip_max);
  ctx.add("rates: max Lipschitz estimate over n", lip_max, lip_ok);
  j["passed"] = bounds_ok && rate_ok && nodes_ok && inv.exterior_flat && inv.section_bounded && lip_ok;
  return j;
}

Json run_phi(Context& ctx) {
  const PhiGraph& pg = ensure_graph(ctx);
  const ExperimentConfig& c = ctx.config;
  const SpectralProblem& pb = ctx.problem;
  const double q_bound = pb.k0() / pb.lambda_n1() + c.phi_tol;
  Json j;

  int empty = 0, partial = 0, over_bound = 0, slow_branches = 0, fitted_branches = 0, multi = 0;
  double worst_exponent = std::numeric_limits<double>::infinity();
  for (const auto& v : pg.values) {
    if (v.branches.empty()) ++empty;
    if (v.partial) ++partial;
    if (v.branches.size() > 1) ++multi;
    for (const auto& b : v.branches) {
      if (b.q0.norm() > q_bound) ++over_bound;
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < b.increments.size(); ++i) {
        if (b.increments[i] > kLogFloor) {
          xs.push_back(static_cast<double>(b.horizons[i + 1]));
          ys.push_back(b.increments[i]);
        }
      }
      if (xs.size() >= 2 && ctx.constants.rate_positive) {
        ++fitted_branches;
        const double exponent = -fit_log_linear(xs, ys).slope;
        worst_exponent = std::min(worst_exponent, exponent);
        if (exponent < 0.5 * ctx.constants.rate) ++slow_branches;
      }
    }
  }
  j["nodes"] = pg.values.size();
  j["empty_nodes"] = empty;
  j["partial_nodes"] = partial;
  j["multi_branch_nodes"] = multi;
  j["branches_over_bound"] = over_bound;
  j["fitted_branches"] = fitted_branches;
  j["slow_branches"] = slow_branches;
  j["worst_exponent"] = fitted_branches > 0 ? Json(worst_exponent) : Json(nullptr);
  ctx.add("phi: nodes without a branch", empty, empty == 0);
  ctx.add("phi: branches with |q0| > K0/lambda_{N+1}", over_bound, over_bound == 0);
  ctx.add("phi: branches decaying slower than rate/2", slow_branches, slow_branches == 0);
  bool passed = empty == 0 && over_bound == 0 && slow_branches == 0;

  // Closed-form values where the problem has one.
  std::mt19937_64 rng(c.seed);
  const Eigen::Index qd = pb.q_dim();
  const auto kind = pb.nonlinearity().kind;
  if (kind == NonlinearityKind::zero || kind == NonlinearityKind::constant_forcing) {
    Vector expected = Vector::Zero(qd);
    if (kind == NonlinearityKind::constant_forcing)
      expected = pb.nonlinearity().forcing.tail(qd).cwiseQuotient(pb.eigenvalues().tail(qd));
    const double tol = kind == NonlinearityKind::zero ? c.phi_tol : ctx.slack() + c.phi_tol;
    double worst = 0.0;
    Json samples = Json::array();
    for (int k = 0; k < 10; ++k) {
      // Close to 0 the cutoff stays inactive along the whole backward orbit.
      const Vector p0 = uniform_in_ball(rng, pb.p_dim(), 0.02 * pb.r_trunc());
      PhiOptions o = phi_options(c);
      o.seed = c.seed + 1000 + static_cast<std::uint64_t>(k);
      const PhiValue v = phi(pb, p0, o);
      double err = std::numeric_limits<double>::infinity();
      if (!v.branches.empty()) {
        err = 0.0;
        for (const auto& b : v.branches) err = std::max(err, (b.q0 - expected).norm());
      }
      worst = std::max(worst, err);
      samples.push_back(to_json(v));
    }
    j["oracle"] = {{"kind", kind == NonlinearityKind::zero ? "zero" : "inverse_forcing"},
                   {"max_error", worst},
                   {"tol", tol},
                   {"samples", samples}};
    ctx.add("phi: closed-form oracle error", worst, worst <= tol);
    passed = passed && worst <= tol;
  }

  // A priori bounds along backward solutions from seeded targets in the support ball.
  int checked = 0, failed = 0, unconverged = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10; ++k) {
    const Vector p0 = uniform_in_ball(rng, pb.p_dim(), pb.r_trunc());
    for (int n = 1; n <= 4; ++n) {
      const ShootingResult r = shoot(pb, p0, n, linear_preimage(pb, p0, n), c.h);
      if (!r.converged) {
        ++unconverged;
        continue;
      }
      const BackwardBoundsReport b = check_backward_bounds(pb, r, ctx.slack());
      ++checked;
      if (!b.passed) ++failed;
      worst_margin = std::min({worst_margin, b.p_margin, b.q_margin, b.a_half_margin});
    }
  }
  j["backward_bounds"] = {{"checked", checked},
                          {"failed", failed},
                          {"unconverged", unconverged},
                          {"worst_margin", checked > 0 ? Json(worst_margin) : Json(nullptr)}};
  ctx.add("phi: backward-bound worst margin", worst_margin, failed == 0);
  passed = passed && failed == 0;
  j["passed"] = passed;
  return j;
}

Json run_inclusion(Context& ctx) {
  const LimitResult& lr = ensure_limit(ctx);
  const PhiGraph& pg = ensure_graph(ctx);
  const InclusionReport inc = inclusion_check(lr.limit, pg.graph, ctx.graph_tol());
  Json j;
  j["report"] = to_json(inc);

  // Where both samples share a p-node the q-values should coincide.
  double shared = 0.0;
  int shared_nodes = 0;
  for (Eigen::Index c = 0; c < pg.graph.size(); ++c) {
    for (Eigen::Index k = 0; k < lr.limit.size(); ++k) {
      if ((lr.limit.p.col(k) - pg.graph.p.col(c)).norm() > 1e-12) continue;
      shared = std::max(shared, (lr.limit.q.col(k) - pg.graph.q.col(c)).norm());
      ++shared_nodes;
      break;
    }
  }
  j["shared_nodes"] = shared_nodes;
  j["shared_node_discrepancy"] = shared;
  bool single = true;
  for (const auto& v : pg.values) single = single && v.branches.size() <= 1;
  j["single_valued"] = single;
  j["reverse_within_tol"] = inc.reverse <= inc.tol;
  ctx.add("inclusion: M_inf -> graph distance", inc.forward, inc.passed);

  const ClosednessReport cl =
      closedness_probe(ctx.problem, pg, ctx.config.probes, ctx.config.seed, phi_options(ctx.config), ctx.jobs);
  j["closedness"] = to_json(cl);
  ctx.add("inclusion: unexplained closedness flags", cl.unexplained, cl.passed);
  j["passed"] = inc.passed && cl.passed;
  return j;
}

Json run_attractor(Context& ctx) {
  const PhiGraph& pg = ensure_graph(ctx);
  const ExperimentConfig& c = ctx.config;
  const Matrix points = sample_attractor(ctx.problem, c.attractor_seeds, c.seed, c.t_transient,
                                         c.t_collect, c.stride, c.h, ctx.jobs);
  write_points_csv((ctx.out / "attractor.csv").string(), points);
  const ContainmentReport r = containment(points, pg.graph, ctx.graph_tol());
  Json j;
  j["points"] = points.cols();
  j["report"] = to_json(r);
  j["max_norm"] = points.colwise().norm().maxCoeff();
  ctx.add("attractor: distance to graph", r.max_distance, r.passed);
  j["passed"] = r.passed;
  return j;
}

Json run_pairs(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const SpectralProblem& pb = ctx.problem;
  std::mt19937_64 rng(c.seed);
  std::vector<std::pair<Vector, Vector>> starts;
  for (int k = 0; k < c.pair_count; ++k) {
    Vector u = uniform_in_ball(rng, pb.dim(), pb.r_trunc());
    Vector v = uniform_in_ball(rng, pb.dim(), pb.r_trunc());
    starts.emplace_back(std::move(u), std::move(v));
  }
  std::vector<SigmaRhoReport> reports(starts.size());
  parallel_for(starts.size(), ctx.jobs, [&](std::size_t k) {
    const Trajectory u = integrate(pb, starts[k].first, c.pair_horizon, c.h);
    const Trajectory v = integrate(pb, starts[k].second, c.pair_horizon, c.h);
    if (k == 0) {
      write_trajectory_csv((ctx.out / "pair_u.csv").string(), u);
      write_trajectory_csv((ctx.out / "pair_v.csv").string(), v);
    }
    reports[k] = verify_sigma_rho(pb, u, v, 0.0, c.pair_horizon, ctx.slack());
  });
  int sigma_v = 0, rho_v = 0, skipped = 0;
  double sigma_ratio = 0.0, rho_ratio = 0.0;
  for (const auto& r : reports) {
    if (r.skipped) {
      ++skipped;
      continue;
    }
    sigma_v += r.sigma_violations > 0;
    rho_v += r.rho_violations > 0;
    sigma_ratio = std::max(sigma_ratio, r.sigma_ratio);
    rho_ratio = std::max(rho_ratio, r.rho_ratio);
  }
  Json j{{"pairs", reports.size()},
         {"skipped", skipped},
         {"sigma_violating_pairs", sigma_v},
         {"rho_violating_pairs", rho_v},
         {"max_sigma_ratio", sigma_ratio},
         {"max_rho_ratio", rho_ratio}};
  ctx.add("pairs: sigma-violating pairs", sigma_v, sigma_v == 0);
  ctx.add("pairs: rho-violating pairs", rho_v, rho_v == 0);
  if (skipped > 0) ctx.add("pairs: skipped (gap too small)", skipped, true);
  j["passed"] = sigma_v == 0 && rho_v == 0;
  return j;
}

std::string render(const std::vector<Row>& rows) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.check.size());
  std::ostringstream s;
  s << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(14)
    << "value" << "status\n";
  for (const auto& r : rows) {
    s << std::left << std::setw(static_cast<int>(width)) << r.check << "  " << std::setw(14)
      << r.value << (r.passed ? "pass" : "FAIL") << '\n';
  }
  return s.str();
}

Json problem_json(const SpectralProblem& pb, const ProblemConfig& pc, const RateConstants& c) {
  return {{"preset", pc.preset},
          {"hash", pb.hash()},
          {"kind", to_string(pb.nonlinearity().kind)},
          {"m", pb.dim()},
          {"n", pb.p_dim()},
          {"eigenvalues", to_json(pb.eigenvalues())},
          {"r_trunc", pb.r_trunc()},
          {"repeated_first_eigenvalue", pb.repeated_first_eigenvalue()},
          {"constants", to_json(c)}};
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir, int jobs) {
  std::filesystem::create_directories(out_dir);
  const SpectralProblem problem = build_problem(config.problem);
  Context ctx{config, problem, rate_constants(problem), out_dir, std::max(1, jobs), {}, {}, {}};

  Json experiments;
  const auto kind = config.kind;
  const bool all = kind == ExperimentKind::all;
  if (all || kind == ExperimentKind::rates) experiments["rates"] = run_rates(ctx);
  if (all || kind == ExperimentKind::phi) experiments["phi"] = run_phi(ctx);
  if (all || kind == ExperimentKind::inclusion) experiments["inclusion"] = run_inclusion(ctx);
  if (all || kind == ExperimentKind::attractor) experiments["attractor"] = run_attractor(ctx);
  if (all || kind == ExperimentKind::pairs) experiments["pairs"] = run_pairs(ctx);

  bool passed = true;
  for (const auto& [name, section] : experiments.items()) passed = passed && section.at("passed").get<bool>();

  RunOutcome outcome;
  outcome.passed = passed;
  outcome.report = {{"config", to_json(config)},
                    {"problem", problem_json(problem, config.problem, ctx.constants)},
                    {"experiments", experiments},
                    {"passed", passed},
                    {"metadata", {{"generated_at", timestamp()}, {"tool", "invset"}}}};
  outcome.summary = render(ctx.rows);
  write_json((ctx.out / "report.json").string(), outcome.report);
  std::ofstream((ctx.out / "summary.txt").string()) << outcome.summary;
  return outcome;
}

std::string describe(const std::string& preset_name) {
  const ProblemConfig pc = preset(preset_name);
  const SpectralProblem pb = build_problem(pc);
  const RateConstants c = rate_constants(pb);
  std::ostringstream s;
  s << std::setprecision(8);
  s << "preset        " << pc.preset << '\n';
  s << "kind          " << to_string(pb.nonlinearity().kind) << '\n';
  s << "M, N          " << pb.dim() << ", " << pb.p_dim() << '\n';
  s << "eigenvalues  ";
  for (Eigen::Index i = 0; i < pb.dim(); ++i) s << ' ' << pb.eigenvalues()(i);
  s << '\n';
  s << "R             " << pb.r_trunc() << '\n';
  s << "K0, K1        " << c.k0 << ", " << c.k1 << '\n';
  s << "alpha, beta   " << c.alpha << ", " << c.beta << '\n';
  s << "K2..K5        " << c.k2 << ", " << c.k3 << ", " << c.k4 << ", " << c.k5 << '\n';
  s << "rate          " << c.rate << '\n';
  s << "gap - alpha   " << c.gap_delta - c.alpha << '\n';
  s << "flags         rate_positive=" << (c.rate_positive ? "true" : "false")
    << " k3_denominator_valid=" << (c.k3_denominator_valid ? "true" : "false")
    << " repeated_first_eigenvalue=" << (pb.repeated_first_eigenvalue() ? "true" : "false") << '\n';
  return s.str();
}

}  // namespace invset
