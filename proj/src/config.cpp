#include "invset/config.hpp"

#include <toml.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace invset {

namespace {

ProblemConfig make_zero() {
  ProblemConfig c;
  c.preset = "zero";
  c.kind = NonlinearityKind::zero;
  return c;
}

ProblemConfig make_forcing() {
  ProblemConfig c;
  c.preset = "forcing";
  c.kind = NonlinearityKind::constant_forcing;
  c.forcing_level = 0.3;
  c.k0 = 0.75;  // |c| = 0.7348
  c.k1 = 2.25;  // |c| * 1.5 / ((1 - 0.5) R) = 2.2045
  return c;
}

ProblemConfig make_decoupled() {
  ProblemConfig c;
  c.preset = "decoupled";
  c.kind = NonlinearityKind::decoupled;
  c.map_name = "quadratic";
  c.map_scale = 1.0;
  c.k0 = 0.45;  // sampled 0.4190 (4000 samples, seed 7)
  c.k1 = 1.8;   // sampled 1.7349
  return c;
}

ProblemConfig make_chafee_infante() {
  ProblemConfig c;
  c.preset = "ci-16-2";
  c.m = 16;
  c.n = 2;
  c.kind = NonlinearityKind::chafee_infante;
  c.nu = 1.0;
  c.k0 = 0.6;  // sampled 0.5552 (4000 samples, seed 7)
  c.k1 = 2.0;  // sampled 1.9008
  return c;
}

void check_keys(const toml::table& table, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : table) {
    if (!allowed.contains(std::string(key.str())))
      throw ConfigError("unknown key '" + std::string(key.str()) + "' in [" + where + "]");
  }
}

template <class T>
void read(const toml::table& table, const std::string& key, T& out) {
  const auto node = table[key];
  if (!node) return;
  if constexpr (std::is_same_v<T, double>) {
    const auto v = node.value<double>();
    if (!v) throw ConfigError("'" + key + "' must be a number");
    out = *v;
  } else if constexpr (std::is_integral_v<T>) {
    const auto v = node.value<std::int64_t>();
    if (!v || !node.is_integer()) throw ConfigError("'" + key + "' must be an integer");
    out = static_cast<T>(*v);
  } else {
    const auto v = node.value<std::string>();
    if (!v) throw ConfigError("'" + key + "' must be a string");
    out = *v;
  }
}

ExperimentKind kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::rates, ExperimentKind::phi, ExperimentKind::inclusion,
                 ExperimentKind::attractor, ExperimentKind::pairs, ExperimentKind::all}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment kind '" + name + "'");
}

void validate(const ExperimentConfig& c) {
  if (!(c.h > 0.0) || c.h > 0.1) throw ConfigError("h must lie in (0, 0.1]");
  if (c.n_max < 4) throw ConfigError("n_max must be at least 4");
  if (c.grid < 4) throw ConfigError("grid must have at least 4 points per axis");
  if (c.phi_grid < 4) throw ConfigError("phi_grid must have at least 4 points per axis");
  if (c.phi_n_max < 2) throw ConfigError("phi_n_max must be at least 2");
  if (c.phi_starts < 1) throw ConfigError("phi_starts must be at least 1");
  if (!(c.limit_tol > 0.0) || !(c.phi_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (c.probes < 0 || c.pair_count < 1 || c.attractor_seeds < 1)
    throw ConfigError("sample counts must be positive");
  if (!(c.t_transient > 0.0) || c.t_collect < 0.0 || !(c.stride > 0.0) || !(c.pair_horizon > 0.0))
    throw ConfigError("time windows must be positive");
  if (c.problem.n < 1 || c.problem.n > 3) throw ConfigError("N must lie in 1..3");
  if (c.out_dir.empty()) throw ConfigError("output directory must not be empty");
  build_problem(c.problem);
}

}  // namespace

ProblemConfig preset(const std::string& name) {
  if (name == "zero") return make_zero();
  if (name == "forcing") return make_forcing();
  if (name == "decoupled") return make_decoupled();
  if (name == "ci-16-2") return make_chafee_infante();
  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"zero", "forcing", "decoupled", "ci-16-2"}; }

SpectralProblem build_problem(const ProblemConfig& c) {
  if (c.m < 2) throw ConfigError("M must be at least 2");
  NonlinearitySpec spec;
  spec.kind = c.kind;
  spec.map_name = c.map_name;
  spec.map_scale = c.map_scale;
  spec.nu = c.nu;
  spec.cutoff_inner = c.cutoff_inner;
  if (c.kind == NonlinearityKind::constant_forcing) {
    spec.forcing = Vector::Constant(c.m, c.forcing_level);
    spec.forcing.head(std::min<Eigen::Index>(c.n, c.m)).setZero();
  }
  const double scale = c.kind == NonlinearityKind::chafee_infante ? c.nu : c.eigen_scale;
  return SpectralProblem(square_eigenvalues(c.m, scale), c.n, spec, c.k0, c.k1, c.r_trunc);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::rates: return "rates";
    case ExperimentKind::phi: return "phi";
    case ExperimentKind::inclusion: return "inclusion";
    case ExperimentKind::attractor: return "attractor";
    case ExperimentKind::pairs: return "pairs";
    case ExperimentKind::all: return "all";
  }
  return "all";
}

ExperimentConfig parse_experiment(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(msg.str());
  }
  check_keys(root, "root", {"problem", "experiment", "output"});

  ExperimentConfig c;
  const toml::table* problem = root["problem"].as_table();
  if (problem == nullptr) throw ConfigError("missing [problem] table");
  check_keys(*problem, "problem",
             {"preset", "m", "n", "eigen_scale", "forcing_level", "map", "map_scale", "nu",
              "cutoff_inner", "r_trunc", "k0", "k1"});
  std::string name;
  read(*problem, "preset", name);
  if (name.empty()) throw ConfigError("[problem] needs a preset");
  c.problem = preset(name);
  read(*problem, "m", c.problem.m);
  read(*problem, "n", c.problem.n);
  read(*problem, "eigen_scale", c.problem.eigen_scale);
  read(*problem, "forcing_level", c.problem.forcing_level);
  read(*problem, "map", c.problem.map_name);
  read(*problem, "map_scale", c.problem.map_scale);
  read(*problem, "nu", c.problem.nu);
  read(*problem, "cutoff_inner", c.problem.cutoff_inner);
  read(*problem, "r_trunc", c.problem.r_trunc);
  read(*problem, "k0", c.problem.k0);
  read(*problem, "k1", c.problem.k1);

  if (const toml::table* exp = root["experiment"].as_table()) {
    check_keys(*exp, "experiment",
               {"kind", "h", "n_max", "grid", "limit_tol", "phi_grid", "phi_n_max", "phi_starts",
                "phi_tol", "probes", "attractor_seeds", "t_transient", "t_collect", "stride",
                "pair_count", "pair_horizon", "seed"});
    std::string kind = to_string(c.kind);
    read(*exp, "kind", kind);
    c.kind = kind_from_string(kind);
    read(*exp, "h", c.h);
    read(*exp, "n_max", c.n_max);
    read(*exp, "grid", c.grid);
    read(*exp, "limit_tol", c.limit_tol);
    read(*exp, "phi_grid", c.phi_grid);
    read(*exp, "phi_n_max", c.phi_n_max);
    read(*exp, "phi_starts", c.phi_starts);
    read(*exp, "phi_tol", c.phi_tol);
    read(*exp, "probes", c.probes);
    read(*exp, "attractor_seeds", c.attractor_seeds);
    read(*exp, "t_transient", c.t_transient);
    read(*exp, "t_collect", c.t_collect);
    read(*exp, "stride", c.stride);
    read(*exp, "pair_count", c.pair_count);
    read(*exp, "pair_horizon", c.pair_horizon);
    std::int64_t seed = static_cast<std::int64_t>(c.seed);
    read(*exp, "seed", seed);
    if (seed < 0) throw ConfigError("seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  if (const toml::table* out = root["output"].as_table()) {
    check_keys(*out, "output", {"dir"});
    read(*out, "dir", c.out_dir);
  }
  validate(c);
  return c;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str());
}

nlohmann::json to_json(const ProblemConfig& c) {
  return {{"preset", c.preset},
          {"m", c.m},
          {"n", c.n},
          {"eigen_scale", c.eigen_scale},
          {"kind", to_string(c.kind)},
          {"forcing_level", c.forcing_level},
          {"map", c.map_name},
          {"map_scale", c.map_scale},
          {"nu", c.nu},
          {"cutoff_inner", c.cutoff_inner},
          {"r_trunc", c.r_trunc},
          {"k0", c.k0},
          {"k1", c.k1}};
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"problem", to_json(c.problem)},
          {"kind", to_string(c.kind)},
          {"h", c.h},
          {"n_max", c.n_max},
          {"grid", c.grid},
          {"limit_tol", c.limit_tol},
          {"phi_grid", c.phi_grid},
          {"phi_n_max", c.phi_n_max},
          {"phi_starts", c.phi_starts},
          {"phi_tol", c.phi_tol},
          {"probes", c.probes},
          {"attractor_seeds", c.attractor_seeds},
          {"t_transient", c.t_transient},
          {"t_collect", c.t_collect},
          {"stride", c.stride},
          {"pair_count", c.pair_count},
          {"pair_horizon", c.pair_horizon},
          {"seed", c.seed}};
}

}  // namespace invset
