#include "invset/backward.hpp"
#include "invset/estimates.hpp"
#include "invset/rate.hpp"

#include "golden.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace invset;
using testing_support::random_in_ball;

namespace {

PhiOptions fast_phi(double h = 1e-3) {
  PhiOptions o;
  o.n_max = 6;
  o.n_starts = 4;
  o.h = h;
  return o;
}

}  // namespace

TEST_CASE("shooting map of the linear flow") {
  const SpectralProblem pb = testing_support::linear_problem(3, 1);
  Vector p(1);
  p << 0.7389;
  CHECK(shooting_map(pb, p, 2, 1e-3)(0) == doctest::Approx(0.7389 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(shooting_map(pb, p, 2, 1e-3)(0) == doctest::Approx(0.1).epsilon(1e-3));
  CHECK_THROWS_AS(shooting_map(pb, p, 0, 1e-3), DomainError);
  CHECK_THROWS_AS(shooting_map(pb, Vector::Zero(2), 1, 1e-3), StructuralError);
}

TEST_CASE("shooting inverts the linear flow") {
  const SpectralProblem pb = testing_support::linear_problem(3, 1);
  Vector p0(1);
  p0 << 0.1;
  const ShootingResult r = shoot(pb, p0, 2, Vector::Zero(1), 1e-3);
  CHECK(r.converged);
  CHECK(r.residual <= 1e-10);
  CHECK(r.p_minus_n(0) == doctest::Approx(0.1 * std::exp(2.0)).epsilon(1e-9));
  CHECK(r.trajectory.times.front() == -2.0);
  CHECK(r.trajectory.times.back() == 0.0);
  CHECK(r.trajectory.states.front().tail(2).norm() == 0.0);
}

TEST_CASE("P-dynamics stay linear under purely Q-directed forcing") {
  Vector c = Vector::Zero(6);
  c.tail(4).setConstant(0.3);
  const SpectralProblem pb = testing_support::forcing_problem(c, 2, 0.75, 2.25);
  CHECK(shooting_map(pb, Vector::Zero(2), 3, 1e-3).norm() == 0.0);
  Vector p0(2);
  p0 << 0.2, -0.1;
  for (int n = 1; n <= 3; ++n) {
    const ShootingResult r = shoot(pb, p0, n, Vector::Zero(2), 1e-3);
    REQUIRE(r.converged);
    Vector want(2);
    want << 0.2 * std::exp(n * 1.0), -0.1 * std::exp(n * 4.0);
    CHECK((r.p_minus_n - want).norm() <= 1e-9 * want.norm());
  }
}

TEST_CASE("Chafee-Infante shooting: residuals, ball containment and pinned values") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  nlohmann::json golden;
  Vector p_init(2);
  p_init << 0.4, -0.3;
  const Vector mapped = shooting_map(pb, p_init, 1, 1e-3);
  // Fine-step self-oracle: first-order agreement.
  CHECK((mapped - shooting_map(pb, p_init, 1, 1e-5)).norm() <= 1e-3 * mapped.norm());
  golden["shooting_map_n1"] = {mapped(0), mapped(1)};

  for (const Vector& p0 : {Vector(Vector::Zero(2)), Vector((Vector(2) << 0.3, -0.2).finished())}) {
    nlohmann::json seq = nlohmann::json::array();
    for (int n = 1; n <= 4; ++n) {
      const ShootingResult r = shoot(pb, p0, n, linear_preimage(pb, p0, n), 1e-3);
      REQUIRE(r.converged);
      CHECK(r.residual <= 1e-8);
      CHECK((shooting_map(pb, r.p_minus_n, n, 1e-3) - p0).norm() <= 1e-8);
      CHECK(r.p_minus_n.norm() <= shooting_ball_radius(pb, p0, n));
      CHECK(r.trajectory.states.front().tail(14).norm() == 0.0);
      seq.push_back({r.p_minus_n(0), r.p_minus_n(1)});
    }
    golden[p0.norm() == 0.0 ? "p_minus_n_origin" : "p_minus_n_offset"] = seq;
  }
  testing_support::check_golden("shooting", golden, 1e-8);
}

TEST_CASE("continuation recovers from a poor initial guess") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  Vector p0(2);
  p0 << 0.5, 0.5;
  Vector guess(2);
  guess << -300.0, 900.0;
  const ShootingResult r = shoot(pb, p0, 3, guess, 1e-3);
  CHECK(r.converged);
  CHECK(r.residual <= 1e-10);
}

TEST_CASE("phi is identically zero without a nonlinearity") {
  const SpectralProblem pb = testing_support::linear_problem(6, 2);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    const PhiValue v = phi(pb, random_in_ball(rng, 2, 1.5), fast_phi());
    REQUIRE(v.branches.size() == 1);
    CHECK(v.branches[0].q0.norm() == 0.0);
    CHECK(v.branches[0].converged);
  }
  CHECK_THROWS_AS(phi(pb, Vector::Zero(2), [] { auto o = fast_phi(); o.n_max = 1; return o; }()),
                  DomainError);
  CHECK_THROWS_AS(phi(pb, Vector::Zero(2), [] { auto o = fast_phi(); o.n_starts = 0; return o; }()),
                  DomainError);
}

TEST_CASE("phi of constant forcing is the stationary Q-solution near the origin") {
  const SpectralProblem pb = testing_support::preset_problem("forcing");
  const Vector expected = pb.nonlinearity().forcing.tail(6).cwiseQuotient(pb.eigenvalues().tail(6));
  const double h = 1e-3;
  const PhiValue at0 = phi(pb, Vector::Zero(2), fast_phi(h));
  REQUIRE(at0.branches.size() == 1);
  CHECK((at0.branches[0].q0 - expected).norm() <= 10.0 * h);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const PhiValue v = phi(pb, random_in_ball(rng, 2, 0.02), fast_phi(h));
    REQUIRE(v.branches.size() == 1);
    CHECK((v.branches[0].q0 - expected).norm() <= 10.0 * h + 1e-8);
  }
}

TEST_CASE("phi of the decoupled problem matches the backward integral") {
  const SpectralProblem pb = testing_support::preset_problem("decoupled");
  const double h = 1e-3;
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int k = 0; k < 6; ++k) {
    const Vector p0 = random_in_ball(rng, 2, pb.r_trunc());
    const PhiValue v = phi(pb, p0, fast_phi(h));
    REQUIRE(v.branches.size() == 1);
    const double err = (v.branches[0].q0 - testing_support::decoupled_oracle(pb, p0)).norm();
    worst = std::max(worst, err);
    CHECK(err <= 10.0 * h + 1e-8);
  }
  MESSAGE("decoupled worst error " << worst);
  CHECK(testing_support::decoupled_oracle(pb, Vector::Zero(2)).norm() == 0.0);
}

TEST_CASE("phi branches are bounded and their increments decay at the Cauchy rate") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  const RateConstants c = rate_constants(pb);
  PhiOptions o = fast_phi();
  o.tol = 1e-13;  // keep iterating so that several increments are recorded
  std::mt19937_64 rng(4);
  for (int k = 0; k < 4; ++k) {
    const PhiValue v = phi(pb, random_in_ball(rng, 2, 1.0), o);
    REQUIRE_FALSE(v.branches.empty());
    for (const auto& b : v.branches) {
      CHECK(b.q0.norm() <= pb.k0() / pb.lambda_n1() + o.tol);
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < b.increments.size(); ++i) {
        if (b.increments[i] <= 1e-14) continue;
        xs.push_back(b.horizons[i + 1]);
        ys.push_back(b.increments[i]);
      }
      if (xs.size() >= 2) CHECK(-fit_log_linear(xs, ys).slope >= 0.5 * c.rate);
    }
  }
}

TEST_CASE("a priori bounds along backward solutions") {
  const double h = 1e-3;
  Vector p0(2);
  p0 << 0.4, 0.3;
  {
    const SpectralProblem pb = testing_support::linear_problem(6, 2);
    const ShootingResult r = shoot(pb, p0, 3, Vector::Zero(2), h);
    const BackwardBoundsReport b = check_backward_bounds(pb, r, 10.0 * h);
    CHECK(b.passed);
    CHECK(b.q_sup == 0.0);
  }
  {
    const SpectralProblem pb = testing_support::preset_problem("forcing");
    const ShootingResult r = shoot(pb, Vector::Zero(2), 4, Vector::Zero(2), h);
    const BackwardBoundsReport b = check_backward_bounds(pb, r, 10.0 * h);
    CHECK(b.passed);
    CHECK(b.q_margin > 0.0);
  }
  {
    const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
    const ShootingResult r = shoot(pb, p0, 4, linear_preimage(pb, p0, 4), h);
    REQUIRE(r.converged);
    const BackwardBoundsReport b = check_backward_bounds(pb, r, 10.0 * h);
    CHECK(b.passed);
    CHECK(b.p_margin >= -10.0 * h);
    CHECK(b.q_margin >= -10.0 * h);
    CHECK(b.a_half_margin >= -10.0 * h);
    ShootingOptions bare;
    bare.keep_trajectory = false;
    CHECK_THROWS_AS(check_backward_bounds(pb, shoot(pb, p0, 1, p0, h, bare), 0.0), StructuralError);
  }
}

TEST_CASE("graph of phi over a grid") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  GridMeta g;
  g.lower = Vector::Constant(2, -1.0);
  g.upper = Vector::Constant(2, 1.0);
  g.resolution = {3, 3};
  const PhiGraph pg = phi_graph(pb, g, fast_phi());
  CHECK(pg.graph.label == "graph_Phi");
  CHECK(pg.values.size() == 9);
  CHECK(pg.graph.size() >= 9);
  CHECK(pg.graph.node.size() == static_cast<std::size_t>(pg.graph.size()));
  CHECK(pg.graph.branch_id.size() == static_cast<std::size_t>(pg.graph.size()));
  CHECK(pg.graph.problem_hash == pb.hash());
  // The centre node is the stationary state 0.
  CHECK(pg.values[4].branches[0].q0.norm() <= 1e-12);
  GridMeta wrong = g;
  wrong.lower = Vector::Constant(3, -1.0);
  CHECK_THROWS_AS(phi_graph(pb, wrong, fast_phi()), StructuralError);
}
