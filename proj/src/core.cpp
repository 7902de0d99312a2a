#include "invset/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace invset {

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::zero:
      return "zero";
    case NonlinearityKind::constant_forcing:
      return "constant_forcing";
    case NonlinearityKind::decoupled:
      return "decoupled";
    case NonlinearityKind::chafee_infante:
      return "chafee_infante";
  }
  return "unknown";
}

NonlinearityKind nonlinearity_kind_from_string(const std::string& name) {
  if (name == "zero") return NonlinearityKind::zero;
  if (name == "constant_forcing") return NonlinearityKind::constant_forcing;
  if (name == "decoupled") return NonlinearityKind::decoupled;
  if (name == "chafee_infante") return NonlinearityKind::chafee_infante;
  throw ConfigError("unknown nonlinearity kind '" + name + "'");
}

DecoupledMap decoupled_map(const std::string& name, double scale) {
  if (name == "quadratic") {
    return [scale](const Vector& p, Eigen::Index q_dim) {
      Vector g(q_dim);
      const double r2 = p.squaredNorm();
      for (Eigen::Index j = 0; j < q_dim; ++j) g(j) = scale * r2 / static_cast<double>(j + 1);
      return g;
    };
  }
  if (name == "bilinear") {
    return [scale](const Vector& p, Eigen::Index q_dim) {
      Vector g(q_dim);
      const double prod = p(0) * p(p.size() - 1);
      for (Eigen::Index j = 0; j < q_dim; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        g(j) = sign * scale * prod / static_cast<double>(j + 1);
      }
      return g;
    };
  }
  throw ConfigError("unknown decoupled map '" + name + "'");
}

double smooth_cutoff(double s, double inner) {
  if (s <= inner) return 1.0;
  if (s >= 1.0) return 0.0;
  const double w = (s - inner) / (1.0 - inner);
  return 1.0 - 3.0 * w * w + 2.0 * w * w * w;
}

double smooth_cutoff_slope(double s, double inner) {
  if (s <= inner || s >= 1.0) return 0.0;
  const double w = (s - inner) / (1.0 - inner);
  return (-6.0 * w + 6.0 * w * w) / (1.0 - inner);
}

namespace {

std::shared_ptr<const Matrix> sine_collocation(Eigen::Index m) {
  // J = 4M points: u^3 has at most 3M modes, so the projection is alias-free.
  const Eigen::Index j_points = 4 * m;
  auto basis = std::make_shared<Matrix>(m, j_points - 1);
  const double norm = std::sqrt(2.0 / std::numbers::pi);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index j = 1; j < j_points; ++j) {
      const double x = std::numbers::pi * static_cast<double>(j) / static_cast<double>(j_points);
      (*basis)(k, j - 1) = norm * std::sin(static_cast<double>(k + 1) * x);
    }
  }
  return basis;
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
}

void hash_double(std::uint64_t& h, double x) { hash_bytes(h, &x, sizeof x); }

}  // namespace

SpectralProblem::SpectralProblem(Vector eigenvalues, int split_index, NonlinearitySpec nonlinearity,
                                 double k0, double k1, double r_trunc)
    : eigenvalues_(std::move(eigenvalues)),
      split_index_(split_index),
      nonlinearity_(std::move(nonlinearity)),
      k0_(k0),
      k1_(k1),
      r_trunc_(r_trunc) {
  const Eigen::Index m = eigenvalues_.size();
  if (m < 2) throw ConfigError("need at least two modes");
  if (split_index_ < 1 || split_index_ >= m)
    throw ConfigError("split index N must satisfy 1 <= N < M");
  if (!(eigenvalues_(0) > 0.0)) throw ConfigError("lambda_1 must be positive");
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    if (!(eigenvalues_(i) <= eigenvalues_(i + 1)))
      throw ConfigError("eigenvalues must be nondecreasing");
  }
  if (!(k0_ >= 0.0) || !(k1_ >= 0.0)) throw ConfigError("k0 and k1 must be nonnegative");
  if (!(r_trunc_ > 0.0)) throw ConfigError("truncation radius must be positive");
  if (!(k1_ < lambda_n1())) throw ConfigError("standing assumption K1 < lambda_{N+1} violated");
  if (!(r_trunc_ > k0_ / lambda1()))
    throw ConfigError("truncation radius must exceed K0 / lambda_1");
  const double inner = nonlinearity_.cutoff_inner;
  if (!(inner > 0.0 && inner < 1.0)) throw ConfigError("cutoff_inner must lie in (0, 1)");

  switch (nonlinearity_.kind) {
    case NonlinearityKind::zero:
      break;
    case NonlinearityKind::constant_forcing:
      if (nonlinearity_.forcing.size() != m)
        throw ConfigError("constant forcing must have M coordinates");
      break;
    case NonlinearityKind::decoupled:
      map_ = decoupled_map(nonlinearity_.map_name, nonlinearity_.map_scale);
      break;
    case NonlinearityKind::chafee_infante:
      if (!(nonlinearity_.nu > 0.0)) throw ConfigError("Chafee-Infante nu must be positive");
      collocation_ = sine_collocation(m);
      break;
  }
}

bool SpectralProblem::repeated_first_eigenvalue() const {
  return eigenvalues_(0) == eigenvalues_(1);
}

SpectralProblem SpectralProblem::with_constants(double k0, double k1) const {
  return SpectralProblem(eigenvalues_, split_index_, nonlinearity_, k0, k1, r_trunc_);
}

Vector SpectralProblem::raw_nonlinearity(const Vector& u) const {
  const Eigen::Index m = dim();
  switch (nonlinearity_.kind) {
    case NonlinearityKind::zero:
      return Vector::Zero(m);
    case NonlinearityKind::constant_forcing:
      return nonlinearity_.forcing;
    case NonlinearityKind::decoupled: {
      Vector g = Vector::Zero(m);
      g.tail(q_dim()) = map_(u.head(p_dim()), q_dim());
      return g;
    }
    case NonlinearityKind::chafee_infante: {
      const Matrix& basis = *collocation_;
      const Vector values = basis.transpose() * u;
      const Vector g = values - values.cwiseProduct(values).cwiseProduct(values);
      const double weight = std::numbers::pi / static_cast<double>(4 * m);
      return weight * (basis * g);
    }
  }
  return Vector::Zero(m);
}

std::string SpectralProblem::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) hash_double(h, eigenvalues_(i));
  hash_bytes(h, &split_index_, sizeof split_index_);
  const int kind = static_cast<int>(nonlinearity_.kind);
  hash_bytes(h, &kind, sizeof kind);
  for (Eigen::Index i = 0; i < nonlinearity_.forcing.size(); ++i)
    hash_double(h, nonlinearity_.forcing(i));
  hash_bytes(h, nonlinearity_.map_name.data(), nonlinearity_.map_name.size());
  hash_double(h, nonlinearity_.map_scale);
  hash_double(h, nonlinearity_.nu);
  hash_double(h, nonlinearity_.cutoff_inner);
  hash_double(h, k0_);
  hash_double(h, k1_);
  hash_double(h, r_trunc_);
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::pair<Vector, Vector> split(const SpectralProblem& problem, const Vector& u) {
  if (u.size() != problem.dim())
    throw StructuralError("state has " + std::to_string(u.size()) + " coordinates, expected " +
                          std::to_string(problem.dim()));
  Vector p = Vector::Zero(u.size());
  Vector q = Vector::Zero(u.size());
  p.head(problem.p_dim()) = u.head(problem.p_dim());
  q.tail(problem.q_dim()) = u.tail(problem.q_dim());
  return {std::move(p), std::move(q)};
}

Vector eval_nonlinearity(const SpectralProblem& problem, const Vector& u) {
  const double s = u.norm() / problem.r_trunc();
  if (s >= 1.0 || problem.nonlinearity().kind == NonlinearityKind::zero)
    return Vector::Zero(problem.dim());
  const double theta = smooth_cutoff(s, problem.nonlinearity().cutoff_inner);
  return theta * problem.raw_nonlinearity(u);
}

ConstantEstimate estimate_constants(const SpectralProblem& problem, int n_samples,
                                    std::uint64_t seed) {
  if (n_samples < 2) throw DomainError("estimate_constants needs at least two samples");
  const auto& nl = problem.nonlinearity();
  const double radius = problem.r_trunc();
  switch (nl.kind) {
    case NonlinearityKind::zero:
      return {0.0, 0.0};
    case NonlinearityKind::constant_forcing: {
      // |theta c| <= |c|; Lipschitz constant of theta(|u|/R) c is |c| max|theta'| / R.
      const double c = nl.forcing.norm();
      const double max_slope = 1.5 / (1.0 - nl.cutoff_inner);
      return {c, c * max_slope / radius};
    }
    case NonlinearityKind::decoupled:
    case NonlinearityKind::chafee_infante:
      break;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Eigen::Index m = problem.dim();
  auto direction = [&] {
    Vector d(m);
    for (Eigen::Index i = 0; i < m; ++i) d(i) = normal(rng);
    return Vector(d / d.norm());
  };

  double k0 = 0.0;
  double k1 = 0.0;
  const double eps = 1e-6 * radius;
  for (int i = 0; i < n_samples; ++i) {
    // Radius uniform in [0, R], not in volume: the cutoff profile lives at mid radii.
    const Vector u = radius * uniform(rng) * direction();
    const Vector fu = eval_nonlinearity(problem, u);
    k0 = std::max(k0, fu.norm());

    // Alternate radial, random and wide pairs for the difference quotient.
    Vector v;
    switch (i % 3) {
      case 0:
        v = u.norm() > 0.0 ? Vector(u + eps * u / u.norm()) : Vector(u + eps * direction());
        break;
      case 1:
        v = u + eps * direction();
        break;
      default:
        v = u + 0.1 * radius * uniform(rng) * direction();
        break;
    }
    const double du = (u - v).norm();
    if (du > 0.0) k1 = std::max(k1, (fu - eval_nonlinearity(problem, v)).norm() / du);
  }
  return {kConstantSafetyFactor * k0, kConstantSafetyFactor * k1};
}

Vector square_eigenvalues(Eigen::Index m, double scale) {
  Vector lambda(m);
  for (Eigen::Index k = 0; k < m; ++k) lambda(k) = scale * static_cast<double>((k + 1) * (k + 1));
  return lambda;
}

}  // namespace invset
