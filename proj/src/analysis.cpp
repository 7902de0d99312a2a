#include "invset/analysis.hpp"

#include "invset/flow.hpp"
#include "invset/hausdorff.hpp"
#include "invset/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace invset {

Matrix sample_attractor(const SpectralProblem& problem, int n_seeds, std::uint64_t seed,
                        double t_transient, double t_collect, double stride, double h, int jobs) {
  if (!(t_transient > 0.0)) throw DomainError("t_transient must be positive");
  if (n_seeds < 1) throw DomainError("need at least one seed");
  if (!(stride > 0.0) || t_collect < 0.0) throw DomainError("invalid collection window");
  const Eigen::Index m = problem.dim();
  const auto per_seed = static_cast<Eigen::Index>(std::floor(t_collect / stride + 1e-9)) + 1;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Vector> starts;
  for (int s = 0; s < n_seeds; ++s) {
    Vector d(m);
    for (Eigen::Index i = 0; i < m; ++i) d(i) = normal(rng);
    const double r = problem.r_trunc() * std::pow(uniform(rng), 1.0 / static_cast<double>(m));
    starts.push_back(r * d / d.norm());
  }

  Matrix out(m, n_seeds * per_seed);
  parallel_for(static_cast<std::size_t>(n_seeds), jobs, [&](std::size_t s) {
    Vector u = flow_map(problem, starts[s], t_transient, h);
    const Eigen::Index base = static_cast<Eigen::Index>(s) * per_seed;
    out.col(base) = u;
    for (Eigen::Index k = 1; k < per_seed; ++k) {
      u = flow_map(problem, u, stride, h);
      out.col(base + k) = u;
    }
  });
  return out;
}

ContainmentReport containment(const Matrix& points, const SampledManifold& manifold, double tol) {
  const Matrix target = manifold.stacked();
  if (points.rows() != target.rows())
    throw StructuralError("points and manifold have different dimensions");
  ContainmentReport r;
  r.tol = tol;
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const double d = point_to_set(points.col(c), target);
    if (d > r.max_distance || r.worst_index < 0) {
      r.max_distance = d;
      r.worst_index = c;
    }
  }
  r.passed = r.max_distance <= tol;
  return r;
}

InclusionReport inclusion_check(const SampledManifold& m_inf, const SampledManifold& graph,
                                double tol) {
  if (m_inf.problem_hash != graph.problem_hash)
    throw StructuralError("samples come from different problems");
  const Matrix a = m_inf.stacked();
  const Matrix b = graph.stacked();
  InclusionReport r;
  r.tol = tol;
  r.forward = directed_hausdorff(a, b);
  r.reverse = directed_hausdorff(b, a);
  r.passed = r.forward <= tol;
  return r;
}

namespace {

struct Cell {
  std::vector<Eigen::Index> corners;  // node indices, bit a of the corner id selects axis a
  Vector weights;                     // multilinear weights in the same order
};

Cell locate(const GridMeta& grid, const Vector& p) {
  const Eigen::Index dims = grid.dims();
  const Vector spacing = grid.spacing();
  std::vector<int> base(static_cast<std::size_t>(dims));
  Vector frac(dims);
  for (Eigen::Index a = 0; a < dims; ++a) {
    const double x = (p(a) - grid.lower(a)) / spacing(a);
    const int last = grid.resolution[static_cast<std::size_t>(a)] - 2;
    const int i = std::clamp(static_cast<int>(std::floor(x)), 0, last);
    base[static_cast<std::size_t>(a)] = i;
    frac(a) = std::clamp(x - i, 0.0, 1.0);
  }
  Cell cell;
  const int count = 1 << dims;
  cell.weights.resize(count);
  for (int c = 0; c < count; ++c) {
    std::vector<int> multi = base;
    double w = 1.0;
    for (Eigen::Index a = 0; a < dims; ++a) {
      const bool up = (c >> a) & 1;
      multi[static_cast<std::size_t>(a)] += up ? 1 : 0;
      w *= up ? frac(a) : 1.0 - frac(a);
    }
    cell.corners.push_back(grid.flat_index(multi));
    cell.weights(c) = w;
  }
  return cell;
}

}  // namespace

ClosednessReport closedness_probe(const SpectralProblem& problem, const PhiGraph& graph,
                                  int n_probes, std::uint64_t seed, const PhiOptions& options,
                                  int jobs) {
  const GridMeta& grid = graph.graph.grid;
  if (grid.dims() != problem.p_dim() ||
      static_cast<Eigen::Index>(graph.values.size()) != grid.node_count())
    throw StructuralError("closedness probe needs a graph sampled on a regular grid");
  const double diag = grid.cell_diagonal();
  const double floor = 10.0 * options.h;

  std::mt19937_64 rng(seed);
  std::vector<Vector> points;
  for (int k = 0; k < n_probes; ++k) {
    Vector p(grid.dims());
    for (Eigen::Index a = 0; a < grid.dims(); ++a) {
      std::uniform_real_distribution<double> axis(grid.lower(a), grid.upper(a));
      p(a) = axis(rng);
    }
    points.push_back(p);
  }

  ClosednessReport report;
  report.probes.resize(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t k) {
    ProbeEntry& e = report.probes[k];
    e.p = points[k];
    const Cell cell = locate(grid, e.p);
    Vector interp = Vector::Zero(problem.q_dim());
    bool corner_multi = false;
    bool corner_missing = false;
    for (std::size_t c = 0; c < cell.corners.size(); ++c) {
      const PhiValue& v = graph.values[static_cast<std::size_t>(cell.corners[c])];
      if (v.branches.empty()) {
        corner_missing = true;
        continue;
      }
      corner_multi = corner_multi || v.branches.size() > 1;
      interp += cell.weights(static_cast<Eigen::Index>(c)) * v.branches.front().q0;
    }
    for (std::size_t a = 0; a < cell.corners.size(); ++a) {
      for (std::size_t b = a + 1; b < cell.corners.size(); ++b) {
        const PhiValue& va = graph.values[static_cast<std::size_t>(cell.corners[a])];
        const PhiValue& vb = graph.values[static_cast<std::size_t>(cell.corners[b])];
        if (va.branches.empty() || vb.branches.empty()) continue;
        const double dp = (va.p0 - vb.p0).norm();
        const double dq = (va.branches.front().q0 - vb.branches.front().q0).norm();
        e.local_lip = std::max(e.local_lip, dq / dp);
      }
    }
    PhiOptions probe_opts = options;
    probe_opts.seed = options.seed + static_cast<std::uint64_t>(grid.node_count()) + k;
    const PhiValue fresh = phi(problem, e.p, probe_opts);
    e.branches = static_cast<int>(fresh.branches.size());
    e.failed = fresh.branches.empty() || corner_missing;
    e.jump = std::numeric_limits<double>::infinity();
    for (const auto& b : fresh.branches) e.jump = std::min(e.jump, (b.q0 - interp).norm());
    e.threshold = 10.0 * e.local_lip * diag + floor;
    e.multi_branch = corner_multi || e.branches > 1;
    e.flagged = e.failed || e.jump > e.threshold;
  });

  for (const auto& e : report.probes) {
    if (std::isfinite(e.jump)) report.modulus = std::max(report.modulus, e.jump);
    if (!e.flagged) continue;
    ++report.flagged;
    if (!e.multi_branch) ++report.unexplained;
  }
  report.passed = report.unexplained == 0;
  return report;
}

}  // namespace invset
