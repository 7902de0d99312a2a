#pragma once

#include "invset/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace invset {

/// Named problem: eigenvalues scale * k^2 for k = 1..m, split n, and the
/// nonlinearity with its pinned constants.
struct ProblemConfig {
  std::string preset;
  Eigen::Index m = 8;
  int n = 2;
  double eigen_scale = 1.0;
  NonlinearityKind kind = NonlinearityKind::zero;
  double forcing_level = 0.0;  // constant_forcing: c_i = level for i > n, 0 otherwise
  std::string map_name = "quadratic";
  double map_scale = 1.0;
  double nu = 1.0;
  double cutoff_inner = 0.5;
  double r_trunc = 1.0;
  double k0 = 0.0;
  double k1 = 0.0;
};

/// Built-in presets: "zero", "forcing", "decoupled", "ci-16-2".
ProblemConfig preset(const std::string& name);
std::vector<std::string> preset_names();

SpectralProblem build_problem(const ProblemConfig& config);

enum class ExperimentKind { rates, phi, inclusion, attractor, pairs, all };
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ProblemConfig problem;
  ExperimentKind kind = ExperimentKind::all;
  double h = 1e-3;
  int n_max = 7;           // M_1 .. M_{n_max}
  int grid = 33;           // points per axis of the forward grid
  double limit_tol = 1e-10;
  int phi_grid = 9;        // points per axis of the graph grid
  int phi_n_max = 6;
  int phi_starts = 8;
  double phi_tol = 1e-8;
  int probes = 8;
  int attractor_seeds = 64;
  double t_transient = 20.0;
  double t_collect = 4.0;
  double stride = 1.0;
  int pair_count = 100;
  double pair_horizon = 2.0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

/// Parses an experiment TOML document; every problem is validated by
/// building it. Errors throw ConfigError.
ExperimentConfig parse_experiment(std::string_view text);
ExperimentConfig load_experiment(const std::string& path);

nlohmann::json to_json(const ProblemConfig& c);
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace invset
