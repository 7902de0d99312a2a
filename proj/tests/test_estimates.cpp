#include "invset/estimates.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace invset;
using testing_support::random_in_ball;

TEST_CASE("alpha and beta for the reference triple") {
  const auto [alpha, beta] = alpha_beta(1.0, 9.0, 2.0);
  CHECK(alpha == doctest::Approx(std::sqrt(20.0) - 4.0).epsilon(1e-14));
  CHECK(alpha == doctest::Approx(0.47214).epsilon(1e-5));
  CHECK(beta == doctest::Approx(8.47214).epsilon(1e-6));
}

TEST_CASE("alpha and beta are the roots of x^2 + gap x - K1^2") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double l1 = 0.1 + 10.0 * u(rng);
    const double ln1 = l1 * (1.0 + 1e-3 + 200.0 * u(rng));
    const double k1 = std::pow(10.0, -3.0 + 5.0 * u(rng));
    const auto [a, b] = alpha_beta(l1, ln1, k1);
    const double gap = ln1 - l1;
    CHECK(std::abs(a * b - k1 * k1) <= 1e-12 * k1 * k1);
    CHECK(std::abs((b - a) - gap) <= 1e-12 * gap);
    CHECK(std::abs(a * a + gap * a - k1 * k1) <= 1e-12 * k1 * k1);
    CHECK(a > 0.0);
    CHECK(a <= k1);
  }
  const auto [a0, b0] = alpha_beta(1.0, 4.0, 0.0);
  CHECK(a0 == 0.0);
  CHECK(b0 == 3.0);
  CHECK_THROWS_AS(alpha_beta(0.0, 4.0, 1.0), DomainError);
  CHECK_THROWS_AS(alpha_beta(4.0, 4.0, 1.0), DomainError);
  CHECK_THROWS_AS(alpha_beta(1.0, 4.0, -1.0), DomainError);
}

TEST_CASE("rate constants for the Chafee-Infante preset") {
  const RateConstants c = rate_constants(testing_support::preset_problem("ci-16-2"));
  CHECK(c.k2 == 2.0);
  CHECK(c.rate == doctest::Approx(9.0 - 2.0 - 0.47214).epsilon(1e-5));
  CHECK(c.rate == doctest::Approx(6.52786).epsilon(1e-6));
  CHECK(c.rate_positive);
  CHECK(c.k3_denominator_valid);
  CHECK(c.gap_delta - c.alpha == doctest::Approx(7.52786).epsilon(1e-6));
  const double gap = 8.0;
  CHECK(c.k3 == doctest::Approx(2.0 / gap + 4.0 / (gap * (gap + c.beta) * (gap - c.alpha))));
  CHECK(c.k4 == doctest::Approx(c.k1 * c.k3));
  CHECK(c.k5 == doctest::Approx(c.k1 * c.k2 / (gap - c.alpha)));
  CHECK(c.cauchy_prefactor() == doctest::Approx(0.6 * 2.0 / 9.0));
}

TEST_CASE("a small gap invalidates the growth coefficient") {
  Vector ev(3);
  ev << 1.0, 1.1, 5.0;
  const SpectralProblem pb(ev, 1, {}, 0.1, 1.0, 1.0);
  const RateConstants c = rate_constants(pb);
  CHECK(c.alpha == doctest::Approx(0.951).epsilon(1e-3));
  CHECK_FALSE(c.k3_denominator_valid);
  CHECK(std::isnan(c.k3));
  CHECK(std::isnan(c.k5));
  Vector u0 = Vector::Zero(3);
  u0(0) = 0.1;
  const Trajectory t = integrate(pb, u0, 1.0, 1e-2);
  const SigmaRhoReport r = verify_sigma_rho(pb, t, t, 0.0, 1.0, 0.0);
  CHECK(r.skipped);
  CHECK(r.checked_times == 0);
}

TEST_CASE("K2 = 2 and the rate is positive whenever lambda_{N+1} >= 2 K1") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double k1 = 0.01 + 3.0 * u(rng);
    Vector ev(3);
    ev << 0.5 + u(rng), 0.0, 0.0;
    ev(1) = std::max(2.0 * k1, ev(0) * 1.01) * (1.0 + u(rng));
    ev(2) = ev(1) + 1.0;
    const SpectralProblem pb(ev, 1, {}, 0.0, k1, 1.0);
    const RateConstants c = rate_constants(pb);
    CHECK(c.k2 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c.rate_positive);
  }
}

TEST_CASE("identical trajectories meet the estimates with equality") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  Vector u0 = Vector::Zero(16);
  u0(0) = 0.3;
  const Trajectory t = integrate(pb, u0, 2.0, 1e-3);
  const SigmaRhoReport r = verify_sigma_rho(pb, t, t, 0.0, 2.0, 0.0);
  CHECK(r.passed);
  CHECK(r.sigma_margin == 0.0);
  CHECK(r.rho_margin == 0.0);
  CHECK(r.checked_times == 2001);
  const Trajectory shorter = integrate(pb, u0, 1.0, 1e-3);
  CHECK_THROWS_AS(verify_sigma_rho(pb, t, shorter, 0.0, 2.0, 0.0), StructuralError);
  CHECK_THROWS_AS(verify_sigma_rho(pb, t, t, 0.5005, 2.0, 0.0), StructuralError);
}

TEST_CASE("random pairs satisfy both estimates on the Chafee-Infante preset") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  std::mt19937_64 rng(21);
  const double h = 1e-3;
  for (int k = 0; k < 25; ++k) {
    const Trajectory u = integrate(pb, random_in_ball(rng, 16, 1.0), 2.0, h);
    const Trajectory v = integrate(pb, random_in_ball(rng, 16, 1.0), 2.0, h);
    const SigmaRhoReport r = verify_sigma_rho(pb, u, v, 0.0, 2.0, 10.0 * h);
    CHECK(r.passed);
    CHECK(r.sigma_ratio < 1.0);
    CHECK(r.rho_ratio < 1.0);
  }
}

TEST_CASE("pairs with equal P-parts decay up to the step-size slack") {
  const SpectralProblem pb = testing_support::preset_problem("ci-16-2");
  std::mt19937_64 rng(5);
  const double h = 1e-3;
  for (int k = 0; k < 20; ++k) {
    const Vector u0 = random_in_ball(rng, 16, 0.5);
    Vector dq = random_in_ball(rng, 16, 0.2);
    dq.head(2).setZero();
    const Trajectory u = integrate(pb, u0, 2.0, h);
    const Trajectory v = integrate(pb, u0 + dq, 2.0, h);
    const SigmaRhoReport r = verify_sigma_rho(pb, u, v, 0.0, 2.0, 10.0 * h);
    CHECK(r.rho0 == 0.0);
    CHECK(r.passed);
    // Relative to the bound alone the decay form can be exceeded; the excess is tiny in absolute terms.
    CHECK(r.sigma_margin > 10.0 * h - 1e-5);
  }
}

TEST_CASE("the linear comparison system outgrows the pure decay form") {
  // |rho|' <= (K1 - l1)|rho| + K1|sigma|, |sigma|' <= K1|rho| + (K1 - lN1)|sigma|, at equality.
  const RateConstants c = rate_constants(testing_support::preset_problem("ci-16-2"));
  Eigen::Matrix2d m;
  m << c.k1 - c.lambda1, c.k1, c.k1, c.k1 - c.lambda_n1;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(m);
  CHECK(eig.eigenvalues()(1) == doctest::Approx(c.k1 - c.lambda1 + c.alpha).epsilon(1e-12));
  CHECK(eig.eigenvalues()(0) == doctest::Approx(c.k1 - c.lambda_n1 - c.alpha).epsilon(1e-12));
  const Eigen::Vector2d x0(0.0, 1.0);
  auto sigma = [&](double t) {
    const Eigen::Vector2d e = (eig.eigenvalues() * t).array().exp();
    return (eig.eigenvectors() * e.asDiagonal() * eig.eigenvectors().transpose() * x0)(1);
  };
  // With rho(0) = 0 the decay form K2 |sigma(0)| e^{-rate t} is all that remains of the bound.
  CHECK(sigma(1.0) / (c.k2 * std::exp(-c.rate)) > 10.0);
  CHECK(sigma(0.0) == doctest::Approx(1.0));
}
