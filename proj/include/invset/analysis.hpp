#pragma once

#include "invset/backward.hpp"
#include "invset/core.hpp"
#include "invset/manifold.hpp"

#include <cstdint>
#include <vector>

namespace invset {

/// Pools states of n_seeds solutions started uniformly in the ball |u| <= R.
/// Each solution runs for t_transient and is then recorded every `stride`
/// over [t_transient, t_transient + t_collect]. Columns are states (M x K),
/// seed-major.
Matrix sample_attractor(const SpectralProblem& problem, int n_seeds, std::uint64_t seed,
                        double t_transient, double t_collect, double stride, double h,
                        int jobs = 1);

struct ContainmentReport {
  double max_distance = 0.0;
  Eigen::Index worst_index = -1;
  double tol = 0.0;
  bool passed = true;
};

/// Distance of every full state (column of `points`) to the points of `manifold`.
ContainmentReport containment(const Matrix& points, const SampledManifold& manifold, double tol);

struct InclusionReport {
  double forward = 0.0;  // directed distance m_inf -> graph
  double reverse = 0.0;  // directed distance graph -> m_inf, reported only
  double tol = 0.0;
  bool passed = true;
};

/// Directed distance from the limit sample to the graph sample; throws
/// StructuralError when the two come from different problems.
InclusionReport inclusion_check(const SampledManifold& m_inf, const SampledManifold& graph,
                                double tol);

struct ProbeEntry {
  Vector p;
  double jump = 0.0;       // distance of the fresh value to the interpolated corners
  double local_lip = 0.0;  // max edge quotient among the cell corners
  double threshold = 0.0;
  int branches = 0;
  bool flagged = false;
  bool multi_branch = false;  // the probe or a corner carries more than one branch
  bool failed = false;        // phi returned a partial result
};

struct ClosednessReport {
  std::vector<ProbeEntry> probes;
  double modulus = 0.0;  // largest jump
  int flagged = 0;
  int unexplained = 0;   // flagged probes without a multi-branch witness
  bool passed = true;
};

/// Compares fresh Phi values at seeded points inside the grid cells against
/// the multilinear interpolation of the corner values. A probe is flagged
/// when the jump exceeds 10 L diag + 10 h, with L the local Lipschitz
/// quotient of the corners and diag the cell diagonal.
ClosednessReport closedness_probe(const SpectralProblem& problem, const PhiGraph& graph,
                                  int n_probes, std::uint64_t seed, const PhiOptions& options,
                                  int jobs = 1);

}  // namespace invset
