#pragma once

#include "invset/config.hpp"
#include "invset/core.hpp"

#include <random>

namespace testing_support {

using invset::Vector;

inline Vector random_in_ball(std::mt19937_64& rng, Eigen::Index dim, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = normal(rng);
  return radius * std::pow(uniform(rng), 1.0 / static_cast<double>(dim)) * d / d.norm();
}

inline invset::SpectralProblem linear_problem(Eigen::Index m, int n, double r = 1.0) {
  return invset::SpectralProblem(invset::square_eigenvalues(m, 1.0), n, {}, 0.0, 0.0, r);
}

inline invset::SpectralProblem forcing_problem(const Vector& c, int n, double k0, double k1,
                                               double r = 1.0) {
  invset::NonlinearitySpec s;
  s.kind = invset::NonlinearityKind::constant_forcing;
  s.forcing = c;
  return invset::SpectralProblem(invset::square_eigenvalues(c.size(), 1.0), n, s, k0, k1, r);
}

inline invset::SpectralProblem preset_problem(const std::string& name) {
  return invset::build_problem(invset::preset(name));
}

}  // namespace testing_support
