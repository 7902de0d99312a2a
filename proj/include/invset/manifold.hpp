#pragma once

#include "invset/core.hpp"

#include <string>
#include <vector>

namespace invset {

/// Regular p-grid a manifold sample was generated from.
struct GridMeta {
  Vector lower;                 // per-axis lower bound
  Vector upper;                 // per-axis upper bound
  std::vector<int> resolution;  // points per axis
  double h = 0.0;               // integrator step used to build the sample (0 for M_0)

  Eigen::Index dims() const { return lower.size(); }
  Eigen::Index node_count() const;
  Vector spacing() const;
  double cell_diagonal() const;
  /// Node coordinates; the last axis varies fastest.
  Vector node(Eigen::Index index) const;
  std::vector<int> multi_index(Eigen::Index index) const;
  Eigen::Index flat_index(const std::vector<int>& multi) const;
};

/// Finite sample of M_t, M_inf or graph(Phi): column k is the point (p.col(k), q.col(k)).
struct SampledManifold {
  std::string label;
  double time = 0.0;
  bool is_limit = false;
  Matrix p;  // N x K
  Matrix q;  // (M - N) x K
  GridMeta grid;
  std::string problem_hash;
  /// Grid node each column was generated from (forward samples) or belongs to (graph_Phi).
  std::vector<Eigen::Index> node;
  /// Branch of the set-valued map at that node; empty unless label is graph_Phi.
  std::vector<int> branch_id;

  Eigen::Index size() const { return p.cols(); }
  /// Points stacked as (p; q) columns.
  Matrix stacked() const;
};

/// Box [-L, L]^N with L = R (res - 1) / (res - 3): the support ball plus one cell of margin.
GridMeta support_grid(Eigen::Index n, double r_trunc, int resolution);

/// Regular grid of p-values on the flat manifold q = 0, labeled "M_0".
///
/// Throws ConfigError if the box misses part of the ball |p| <= support_radius,
/// if some axis has fewer than two points, or if N > 3.
SampledManifold sample_flat_manifold(const Vector& lower, const Vector& upper,
                                     const std::vector<int>& resolution, Eigen::Index q_dim,
                                     double support_radius);

/// Multiset of q-components, one column per point.
Matrix q_section(const SampledManifold& m);

}  // namespace invset
