#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace invset {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error taxonomy shared by every module.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NonlinearityKind { zero, constant_forcing, decoupled, chafee_infante };

std::string to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_kind_from_string(const std::string& name);

/// Smooth map g : PH -> QH used by the decoupled nonlinearity, G(p + q) = (0, g(p)).
/// Every registered map satisfies g(0) = 0.
using DecoupledMap = std::function<Vector(const Vector& p, Eigen::Index q_dim)>;

/// Looks up a named decoupled map ("quadratic", "bilinear"); unknown names throw ConfigError.
DecoupledMap decoupled_map(const std::string& name, double scale);

struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::zero;
  Vector forcing;            // constant_forcing: c, length M
  std::string map_name;      // decoupled
  double map_scale = 1.0;    // decoupled
  double nu = 1.0;           // chafee_infante diffusion coefficient
  double cutoff_inner = 0.5; // fraction of R where the cutoff starts to act
};

/// C^1 cubic smoothstep: 1 for s <= inner, 0 for s >= 1.
double smooth_cutoff(double s, double inner);
/// Derivative of smooth_cutoff with respect to s.
double smooth_cutoff_slope(double s, double inner);

/// Galerkin-truncated problem u' + Au = F(u) in the eigenbasis of A.
///
/// Coordinates are coefficients in an orthonormal eigenbasis, so the
/// Euclidean norm of a coordinate vector is the norm of H. The first
/// `split_index` coordinates span PH, the rest QH.
class SpectralProblem {
 public:
  SpectralProblem(Vector eigenvalues, int split_index, NonlinearitySpec nonlinearity, double k0,
                  double k1, double r_trunc);

  const Vector& eigenvalues() const { return eigenvalues_; }
  Eigen::Index dim() const { return eigenvalues_.size(); }
  Eigen::Index p_dim() const { return split_index_; }
  Eigen::Index q_dim() const { return eigenvalues_.size() - split_index_; }
  int split_index() const { return split_index_; }
  const NonlinearitySpec& nonlinearity() const { return nonlinearity_; }
  double k0() const { return k0_; }
  double k1() const { return k1_; }
  double r_trunc() const { return r_trunc_; }

  double lambda1() const { return eigenvalues_(0); }
  double lambda_n() const { return eigenvalues_(split_index_ - 1); }
  double lambda_n1() const { return eigenvalues_(split_index_); }

  /// True when lambda_1 == lambda_2; permitted, but reported by `describe`.
  bool repeated_first_eigenvalue() const;

  /// Same discretization and nonlinearity with different pinned constants.
  SpectralProblem with_constants(double k0, double k1) const;

  /// Raw (untruncated) nonlinearity G(u).
  Vector raw_nonlinearity(const Vector& u) const;

  /// Stable content hash over eigenvalues, split, nonlinearity and constants (hex).
  std::string hash() const;

 private:
  Vector eigenvalues_;
  int split_index_;
  NonlinearitySpec nonlinearity_;
  double k0_;
  double k1_;
  double r_trunc_;
  DecoupledMap map_;
  // Sine-basis collocation matrix (M x J-1) for the Chafee-Infante kind.
  std::shared_ptr<const Matrix> collocation_;
};

/// Orthogonal split u = p + q; both parts zero-padded to full length.
std::pair<Vector, Vector> split(const SpectralProblem& problem, const Vector& u);

/// Truncated nonlinearity F(u) = theta(|u| / R) G(u).
Vector eval_nonlinearity(const SpectralProblem& problem, const Vector& u);

struct ConstantEstimate {
  double k0 = 0.0;
  double k1 = 0.0;
};

inline constexpr double kConstantSafetyFactor = 1.25;

/// Certified bound / Lipschitz constants of F. Zero and constant forcing are
/// analytic; the other kinds take the maximum over a seeded sample of the
/// support ball (values and radial/random difference quotients) times
/// kConstantSafetyFactor.
ConstantEstimate estimate_constants(const SpectralProblem& problem, int n_samples,
                                    std::uint64_t seed);

/// Eigenvalues lambda_k = scale * k^2, k = 1..m.
Vector square_eigenvalues(Eigen::Index m, double scale);

}  // namespace invset
