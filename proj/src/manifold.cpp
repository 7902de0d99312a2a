#include "invset/manifold.hpp"

#include <cmath>

namespace invset {

Eigen::Index GridMeta::node_count() const {
  Eigen::Index count = 1;
  for (int r : resolution) count *= r;
  return count;
}

Vector GridMeta::spacing() const {
  Vector s(dims());
  for (Eigen::Index a = 0; a < dims(); ++a)
    s(a) = (upper(a) - lower(a)) / static_cast<double>(resolution[static_cast<std::size_t>(a)] - 1);
  return s;
}

double GridMeta::cell_diagonal() const { return spacing().norm(); }

std::vector<int> GridMeta::multi_index(Eigen::Index index) const {
  std::vector<int> multi(resolution.size());
  for (std::size_t a = resolution.size(); a-- > 0;) {
    multi[a] = static_cast<int>(index % resolution[a]);
    index /= resolution[a];
  }
  return multi;
}

Eigen::Index GridMeta::flat_index(const std::vector<int>& multi) const {
  Eigen::Index index = 0;
  for (std::size_t a = 0; a < resolution.size(); ++a) index = index * resolution[a] + multi[a];
  return index;
}

Vector GridMeta::node(Eigen::Index index) const {
  const auto multi = multi_index(index);
  const Vector s = spacing();
  Vector x(dims());
  for (Eigen::Index a = 0; a < dims(); ++a) {
    const int i = multi[static_cast<std::size_t>(a)];
    // Hit the upper bound exactly on the last node.
    x(a) = (i == resolution[static_cast<std::size_t>(a)] - 1) ? upper(a) : lower(a) + i * s(a);
  }
  return x;
}

Matrix SampledManifold::stacked() const {
  Matrix out(p.rows() + q.rows(), p.cols());
  out.topRows(p.rows()) = p;
  out.bottomRows(q.rows()) = q;
  return out;
}

GridMeta support_grid(Eigen::Index n, double r_trunc, int resolution) {
  if (resolution < 4) throw ConfigError("support grid needs at least four points per axis");
  const double half = r_trunc * (resolution - 1) / static_cast<double>(resolution - 3);
  GridMeta g;
  g.lower = Vector::Constant(n, -half);
  g.upper = Vector::Constant(n, half);
  g.resolution.assign(static_cast<std::size_t>(n), resolution);
  return g;
}

SampledManifold sample_flat_manifold(const Vector& lower, const Vector& upper,
                                     const std::vector<int>& resolution, Eigen::Index q_dim,
                                     double support_radius) {
  const Eigen::Index n = lower.size();
  if (upper.size() != n || static_cast<Eigen::Index>(resolution.size()) != n)
    throw ConfigError("grid bounds and resolution disagree in dimension");
  if (n < 1 || n > 3) throw ConfigError("p-grids are supported for 1 <= N <= 3 only");
  for (Eigen::Index a = 0; a < n; ++a) {
    if (resolution[static_cast<std::size_t>(a)] < 2)
      throw ConfigError("grid resolution must be at least 2 per axis");
    if (!(lower(a) <= -support_radius && upper(a) >= support_radius))
      throw ConfigError("grid bounds do not cover the support ball");
  }

  SampledManifold m;
  m.label = "M_0";
  m.grid.lower = lower;
  m.grid.upper = upper;
  m.grid.resolution = resolution;
  const Eigen::Index count = m.grid.node_count();
  m.p.resize(n, count);
  m.q = Matrix::Zero(q_dim, count);
  m.node.resize(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    m.p.col(k) = m.grid.node(k);
    m.node[static_cast<std::size_t>(k)] = k;
  }
  return m;
}

Matrix q_section(const SampledManifold& m) { return m.q; }

}  // namespace invset
