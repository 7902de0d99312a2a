#pragma once

#include "invset/core.hpp"
#include "invset/manifold.hpp"
#include "invset/rate.hpp"

#include <vector>

namespace invset {

/// Pushes every point (p0, 0) of a flat manifold through the time-t flow.
/// The result is labeled "M_<t>" at integer t and "M_t" otherwise; columns keep their grid node.
SampledManifold evolve_manifold(const SpectralProblem& problem, const SampledManifold& m0, double t,
                                double h, int jobs = 1);

/// M_n sampled over fixed p-nodes: for each node p* of `m0` the point of the
/// flat manifold whose time-n image has P-part p* is found by shooting, and
/// the sample is (p*, Q u(n)). `preimages` (N x K) warm-starts the solve
/// when non-empty and receives the solved preimages.
struct AnchorOptions {
  double tol = 1e-12;
  int jobs = 1;
};
struct AnchoredSample {
  SampledManifold manifold;
  int unresolved = 0;  // nodes whose shooting did not reach tol
  double max_residual = 0.0;
};
AnchoredSample anchor_manifold(const SpectralProblem& problem, const SampledManifold& m0, int n,
                               double h, Matrix& preimages, const AnchorOptions& options = {});

enum class LimitSampling {
  anchored,    // M_n sampled over the fixed grid nodes (default)
  pushforward  // M_n sampled at the images of the grid nodes
};

struct LimitResult {
  SampledManifold limit;  // labeled "M_inf"
  RateReport report;
  std::vector<SampledManifold> sequence;  // M_1 .. M_{n_max}
  int n_star = 0;
  bool converged = false;
  int unresolved_nodes = 0;  // anchored nodes whose shooting did not converge
};

/// Builds M_1..M_{n_max} at integer times and returns M_{n*}, the first
/// iterate with d_H(QM_{n+1}, QM_n) < tol (M_{n_max}, flagged, otherwise).
LimitResult manifold_limit(const SpectralProblem& problem, const SampledManifold& grid, int n_max,
                           double h, double tol, LimitSampling sampling = LimitSampling::anchored,
                           int jobs = 1);

struct LipschitzEstimate {
  double value = 0.0;
  bool fold = false;        // some adjacent p-images coincided within 1e-9
  bool degenerate = false;  // every adjacent pair coincided
  int excluded_pairs = 0;
};

/// Max over grid-adjacent pairs of |q_i - q_j| / |p_i - p_j|.
LipschitzEstimate lipschitz_estimate(const SampledManifold& m);

struct ForwardInvariantReport {
  double exterior_q_max = 0.0;  // max |q| over points with |p| > R
  double q_max = 0.0;           // max |q| over all points
  double q_bound = 0.0;         // K0 / lambda_{N+1}
  bool exterior_flat = true;    // exterior_q_max <= slack
  bool section_bounded = true;  // q_max <= q_bound + slack
};

/// Exterior flatness (q = 0 where |p| > R) and |q| <= K0/lambda_{N+1}, each up to `slack`.
ForwardInvariantReport check_forward_invariants(const SpectralProblem& problem,
                                                const SampledManifold& m, double slack);

}  // namespace invset
