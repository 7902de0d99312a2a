#include "invset/forward.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace invset;

namespace {

SampledManifold flat(const SpectralProblem& pb, int res) {
  const GridMeta g = support_grid(pb.p_dim(), pb.r_trunc(), res);
  return sample_flat_manifold(g.lower, g.upper, g.resolution, pb.q_dim(), pb.r_trunc());
}

}  // namespace

TEST_CASE("flat manifold samples") {
  const SampledManifold a =
      sample_flat_manifold(Vector::Constant(1, -2.0), Vector::Constant(1, 2.0), {5}, 3, 1.0);
  CHECK(a.label == "M_0");
  CHECK(a.size() == 5);
  CHECK(a.p.row(0) == (Eigen::RowVectorXd(5) << -2, -1, 0, 1, 2).finished());
  CHECK(a.q.rows() == 3);
  CHECK(a.q.isZero(0.0));

  const SampledManifold b =
      sample_flat_manifold(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0), {3, 3}, 4, 1.0);
  CHECK(b.size() == 9);
  CHECK(b.p.col(1) == (Vector(2) << -1, 0).finished());
  CHECK(b.p.col(3) == (Vector(2) << 0, -1).finished());
  CHECK(b.node[7] == 7);
  CHECK(b.grid.multi_index(5) == std::vector<int>{1, 2});
  CHECK(b.grid.flat_index({2, 1}) == 7);
  CHECK(b.grid.cell_diagonal() == doctest::Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(sample_flat_manifold(Vector::Constant(1, -0.5), Vector::Constant(1, 2.0), {5}, 3, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(sample_flat_manifold(Vector::Constant(1, -2.0), Vector::Constant(1, 2.0), {1}, 3, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(sample_flat_manifold(Vector::Constant(4, -2.0), Vector::Constant(4, 2.0), {3, 3, 3, 3},
                                       3, 1.0),
                  ConfigError);

  const GridMeta s = support_grid(2, 1.0, 33);
  CHECK(s.upper(0) == doctest::Approx(32.0 / 30.0));
  CHECK(s.spacing()(0) == doctest::Approx(2.0 / 30.0));
}

TEST_CASE("evolution without nonlinearity keeps the manifold flat") {
  const SpectralProblem pb = testing_support::linear_problem(6, 2);
  const SampledManifold m0 = flat(pb, 9);
  const SampledManifold m = evolve_manifold(pb, m0, 1.0, 1e-3);
  CHECK(m.label == "M_1");
  CHECK(m.time == 1.0);
  CHECK(m.q.isZero(0.0));
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    CHECK(m.p(0, k) == doctest::Approx(std::exp(-1.0) * m0.p(0, k)).epsilon(1e-12));
    CHECK(m.p(1, k) == doctest::Approx(std::exp(-4.0) * m0.p(1, k)).epsilon(1e-12));
  }
}

TEST_CASE("forced Q-components relax to the stationary value inside the inner ball") {
  Vector c = Vector::Zero(5);
  c.tail(3).setConstant(0.05);
  const SpectralProblem pb = testing_support::forcing_problem(c, 2, c.norm(), 0.0, 10.0);
  const SampledManifold m0 =
      sample_flat_manifold(Vector::Constant(2, -0.2), Vector::Constant(2, 0.2), {3, 3}, 3, 0.1);
  const SampledManifold m = evolve_manifold(pb, m0, 8.0, 1e-2);
  const Vector want = c.tail(3).cwiseQuotient(pb.eigenvalues().tail(3));
  for (Eigen::Index k = 0; k < m.size(); ++k) CHECK((m.q.col(k) - want).norm() <= 1e-12);
}

TEST_CASE("forward invariants on the Chafee-Infante preset") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  const SampledManifold m0 = flat(pb, 9);
  for (double t : {0.5, 2.0}) {
    const SampledManifold m = evolve_manifold(pb, m0, t, 1e-3);
    const ForwardInvariantReport r = check_forward_invariants(pb, m, 10.0 * 1e-3);
    CHECK(r.section_bounded);
    CHECK(r.q_max <= r.q_bound + 1e-2);
    CHECK(r.q_bound == doctest::Approx(0.6 / 9.0));
    const LipschitzEstimate l = lipschitz_estimate(m);
    CHECK(std::isfinite(l.value));
    CHECK_FALSE(l.degenerate);
  }
}

TEST_CASE("exterior flatness detects a lifted point") {
  const SpectralProblem pb = testing_support::linear_problem(5, 2);
  SampledManifold m = flat(pb, 9);
  CHECK(check_forward_invariants(pb, m, 0.0).exterior_flat);
  m.q(0, 0) = 0.5;  // corner node, |p| > R
  const ForwardInvariantReport r = check_forward_invariants(pb, m, 1e-3);
  CHECK_FALSE(r.exterior_flat);
  CHECK(r.exterior_q_max == 0.5);
}

TEST_CASE("Lipschitz quotient flags folds") {
  SampledManifold m =
      sample_flat_manifold(Vector::Constant(1, -2.0), Vector::Constant(1, 2.0), {5}, 1, 1.0);
  m.q.row(0) << 0.0, 0.5, 1.0, 0.5, 0.0;
  const LipschitzEstimate l = lipschitz_estimate(m);
  CHECK(l.value == doctest::Approx(0.5));
  CHECK_FALSE(l.fold);
  m.p(0, 1) = m.p(0, 0);
  const LipschitzEstimate folded = lipschitz_estimate(m);
  CHECK(folded.fold);
  CHECK(folded.excluded_pairs == 1);
  m.p.setZero();
  CHECK(lipschitz_estimate(m).degenerate);
}

TEST_CASE("limit of the zero preset is the flat manifold") {
  const SpectralProblem pb = testing_support::preset_problem("zero");
  const SampledManifold g = flat(pb, 9);
  CHECK_THROWS_AS(manifold_limit(pb, g, 1, 1e-3, 1e-10), DomainError);
  const LimitResult r = manifold_limit(pb, g, 4, 1e-3, 1e-10);
  CHECK(r.converged);
  CHECK(r.limit.label == "M_inf");
  CHECK(r.limit.is_limit);
  CHECK(r.limit.q.isZero(0.0));
  CHECK(r.sequence.size() == 4);
  CHECK(r.unresolved_nodes == 0);
  CHECK((r.limit.p - g.p).norm() <= 1e-12);
}

TEST_CASE("anchored samples lie on the pushed-forward manifold") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  const double h = 1e-3;
  const SampledManifold g = flat(pb, 9);
  Matrix pre;
  const AnchoredSample a = anchor_manifold(pb, g, 2, h, pre);
  CHECK(a.unresolved == 0);
  CHECK(a.max_residual <= 1e-12);
  CHECK(a.manifold.p == g.p);
  CHECK(pre.cols() == g.size());
  // Each anchored point is the image of its solved preimage on M_0.
  for (Eigen::Index k = 0; k < g.size(); k += 7) {
    Vector u0 = Vector::Zero(pb.dim());
    u0.head(2) = pre.col(k);
    const Vector u = flow_map(pb, u0, 2.0, h);
    CHECK((u.head(2) - g.p.col(k)).norm() <= 1e-11);
    CHECK((u.tail(14) - a.manifold.q.col(k)).norm() <= 1e-11);
  }
}

TEST_CASE("anchored sampling converges and is independent of the worker count") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  const SampledManifold g = flat(pb, 9);
  const LimitResult one = manifold_limit(pb, g, 5, 1e-3, 1e-10, LimitSampling::anchored, 1);
  const LimitResult two = manifold_limit(pb, g, 5, 1e-3, 1e-10, LimitSampling::anchored, 2);
  CHECK(one.limit.q == two.limit.q);
  CHECK(one.report.distances == two.report.distances);
  CHECK(one.converged);
  CHECK(one.report.bound_violations == 0);
  const ForwardInvariantReport inv = check_forward_invariants(pb, one.limit, 1e-2);
  CHECK(inv.exterior_flat);
  CHECK(inv.section_bounded);
}

TEST_CASE("pushforward sampling is available and flagged when it stalls") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  const LimitResult r = manifold_limit(pb, flat(pb, 9), 3, 1e-3, 1e-10, LimitSampling::pushforward);
  CHECK(r.sequence.size() == 3);
  CHECK(r.report.distances.size() == 2);
  CHECK_FALSE(r.converged);
  CHECK(r.n_star == 3);
}
