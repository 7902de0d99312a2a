#include "invset/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace invset {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return in;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

// Rows of a numeric CSV after the header; every row must have `width` fields.
std::vector<std::vector<double>> read_rows(std::ifstream& in, std::size_t width,
                                           const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) throw StructuralError("ragged row in " + path);
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(std::stod(f));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  const Eigen::Index m = traj.states.empty() ? 0 : traj.states.front().size();
  out << "t";
  for (Eigen::Index i = 1; i <= m; ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << format_double(traj.times[k]);
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_double(traj.states[k](i));
    out << '\n';
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  std::getline(in, header);
  const auto width = split_fields(header).size();
  if (width < 2) throw StructuralError("trajectory CSV needs t and at least one coordinate");
  Trajectory traj;
  for (const auto& row : read_rows(in, width, path)) {
    traj.times.push_back(row.front());
    traj.states.push_back(Eigen::Map<const Vector>(row.data() + 1, static_cast<Eigen::Index>(width - 1)));
  }
  if (traj.times.size() > 1) traj.step = traj.times[1] - traj.times[0];
  return traj;
}

void write_points_csv(const std::string& path, const Matrix& points) {
  auto out = open_out(path);
  for (Eigen::Index i = 1; i <= points.rows(); ++i) out << (i > 1 ? "," : "") << 'x' << i;
  out << '\n';
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      out << (i > 0 ? "," : "") << format_double(points(i, c));
    out << '\n';
  }
}

void write_manifold(const std::string& stem, const SampledManifold& m) {
  const bool branches = !m.branch_id.empty();
  {
    auto out = open_out(stem + ".csv");
    for (Eigen::Index i = 1; i <= m.p.rows(); ++i) out << (i > 1 ? "," : "") << 'p' << i;
    for (Eigen::Index i = 1; i <= m.q.rows(); ++i) out << ",q" << i;
    if (branches) out << ",branch_id";
    out << '\n';
    for (Eigen::Index c = 0; c < m.size(); ++c) {
      for (Eigen::Index i = 0; i < m.p.rows(); ++i)
        out << (i > 0 ? "," : "") << format_double(m.p(i, c));
      for (Eigen::Index i = 0; i < m.q.rows(); ++i) out << ',' << format_double(m.q(i, c));
      if (branches) out << ',' << m.branch_id[static_cast<std::size_t>(c)];
      out << '\n';
    }
  }
  Json side;
  side["label"] = m.label;
  side["time"] = m.is_limit ? Json("limit") : Json(m.time);
  side["grid_meta"] = to_json(m.grid);
  side["problem_hash"] = m.problem_hash;
  side["n_dim"] = m.p.rows();
  side["q_dim"] = m.q.rows();
  side["node"] = m.node;
  write_json(stem + ".json", side);
}

SampledManifold read_manifold(const std::string& stem) {
  Json side;
  {
    auto in = open_in(stem + ".json");
    in >> side;
  }
  SampledManifold m;
  m.label = side.at("label").get<std::string>();
  m.is_limit = side.at("time").is_string();
  m.time = m.is_limit ? 0.0 : side.at("time").get<double>();
  m.problem_hash = side.at("problem_hash").get<std::string>();
  const auto& g = side.at("grid_meta");
  const auto lower = g.at("lower").get<std::vector<double>>();
  const auto upper = g.at("upper").get<std::vector<double>>();
  m.grid.lower = Eigen::Map<const Vector>(lower.data(), static_cast<Eigen::Index>(lower.size()));
  m.grid.upper = Eigen::Map<const Vector>(upper.data(), static_cast<Eigen::Index>(upper.size()));
  m.grid.resolution = g.at("resolution").get<std::vector<int>>();
  m.grid.h = g.at("h").get<double>();
  m.node = side.at("node").get<std::vector<Eigen::Index>>();
  const auto n = side.at("n_dim").get<Eigen::Index>();
  const auto qd = side.at("q_dim").get<Eigen::Index>();

  auto in = open_in(stem + ".csv");
  std::string header;
  std::getline(in, header);
  const bool branches = header.ends_with(",branch_id");
  const auto width = static_cast<std::size_t>(n + qd) + (branches ? 1 : 0);
  const auto rows = read_rows(in, width, stem + ".csv");
  const auto cols = static_cast<Eigen::Index>(rows.size());
  m.p.resize(n, cols);
  m.q.resize(qd, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto& row = rows[static_cast<std::size_t>(c)];
    for (Eigen::Index i = 0; i < n; ++i) m.p(i, c) = row[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < qd; ++i) m.q(i, c) = row[static_cast<std::size_t>(n + i)];
    if (branches) m.branch_id.push_back(static_cast<int>(row.back()));
  }
  return m;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json to_json(const GridMeta& g) {
  return {{"lower", to_json(g.lower)},
          {"upper", to_json(g.upper)},
          {"resolution", g.resolution},
          {"h", g.h}};
}

Json to_json(const RateConstants& c) {
  return {{"lambda1", c.lambda1},
          {"lambda_n", c.lambda_n},
          {"lambda_n1", c.lambda_n1},
          {"k0", c.k0},
          {"k1", c.k1},
          {"alpha", number(c.alpha)},
          {"beta", number(c.beta)},
          {"k2", number(c.k2)},
          {"k3", number(c.k3)},
          {"k4", number(c.k4)},
          {"k5", number(c.k5)},
          {"rate", number(c.rate)},
          {"gap_delta", c.gap_delta},
          {"rate_positive", c.rate_positive},
          {"k3_denominator_valid", c.k3_denominator_valid}};
}

Json to_json(const RateReport& r) {
  Json j{{"indices", r.indices},
         {"distances", r.distances},
         {"bounds", r.bounds},
         {"floored", r.floored},
         {"fitted_rate", r.fitted_rate ? Json(*r.fitted_rate) : Json(nullptr)},
         {"theoretical_rate", number(r.theoretical_rate)},
         {"prefactor", r.prefactor},
         {"resolution_floor", r.resolution_floor},
         {"converged", r.converged},
         {"bound_violations", r.bound_violations},
         {"slack_band", {r.slack_band.first, r.slack_band.second}},
         {"rate_in_band", r.rate_in_band()}};
  return j;
}

Json to_json(const SigmaRhoReport& r) {
  return {{"skipped", r.skipped},
          {"passed", r.passed},
          {"sigma_violations", r.sigma_violations},
          {"rho_violations", r.rho_violations},
          {"sigma_margin", number(r.sigma_margin)},
          {"rho_margin", number(r.rho_margin)},
          {"sigma_ratio", r.sigma_ratio},
          {"rho_ratio", r.rho_ratio},
          {"rho0", r.rho0},
          {"sigma0", r.sigma0}};
}

Json to_json(const BackwardBoundsReport& r) {
  return {{"p_margin", number(r.p_margin)},
          {"q_margin", number(r.q_margin)},
          {"a_half_margin", number(r.a_half_margin)},
          {"q_sup", r.q_sup},
          {"a_half_q_sup", r.a_half_q_sup},
          {"passed", r.passed}};
}

Json to_json(const LipschitzEstimate& e) {
  return {{"value", e.value},
          {"fold", e.fold},
          {"degenerate", e.degenerate},
          {"excluded_pairs", e.excluded_pairs}};
}

Json to_json(const ForwardInvariantReport& r) {
  return {{"exterior_q_max", r.exterior_q_max},
          {"q_max", r.q_max},
          {"q_bound", r.q_bound},
          {"exterior_flat", r.exterior_flat},
          {"section_bounded", r.section_bounded}};
}

Json to_json(const ContainmentReport& r) {
  return {{"max_distance", r.max_distance},
          {"worst_index", r.worst_index},
          {"tol", r.tol},
          {"passed", r.passed}};
}

Json to_json(const InclusionReport& r) {
  return {{"forward", r.forward}, {"reverse", r.reverse}, {"tol", r.tol}, {"passed", r.passed}};
}

Json to_json(const ClosednessReport& r) {
  Json probes = Json::array();
  for (const auto& e : r.probes) {
    probes.push_back({{"p", to_json(e.p)},
                      {"jump", number(e.jump)},
                      {"local_lip", e.local_lip},
                      {"threshold", e.threshold},
                      {"branches", e.branches},
                      {"flagged", e.flagged},
                      {"multi_branch", e.multi_branch},
                      {"failed", e.failed}});
  }
  return {{"probes", probes},
          {"modulus", r.modulus},
          {"flagged", r.flagged},
          {"unexplained", r.unexplained},
          {"passed", r.passed}};
}

Json to_json(const PhiValue& v) {
  Json branches = Json::array();
  for (const auto& b : v.branches) {
    branches.push_back({{"q0", to_json(b.q0)},
                        {"increments", b.increments},
                        {"horizons", b.horizons},
                        {"residual", b.residual},
                        {"converged", b.converged}});
  }
  return {{"p0", to_json(v.p0)},
          {"branches", branches},
          {"horizon_used", v.horizon_used},
          {"partial", v.partial},
          {"failed_starts", v.failed_starts}};
}

void write_json(const std::string& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace invset
