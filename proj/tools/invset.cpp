#include "invset/experiments.hpp"
#include "invset/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Invariant sets of truncated semilinear equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "run an experiment from a TOML config");
  run->add_option("--config", config_path, "experiment config")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--jobs", jobs, "worker threads (default: INVSET_JOBS or 1)");

  std::string preset_name;
  auto* describe = app.add_subcommand("describe", "print the constants of a preset");
  describe->add_option("preset", preset_name, "preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*describe) {
      std::cout << invset::describe(preset_name);
      return 0;
    }
    const invset::ExperimentConfig config = invset::load_experiment(config_path);
    const std::string dir = out_dir.empty() ? config.out_dir : out_dir;
    const int workers = jobs > 0 ? jobs : invset::default_jobs();
    const invset::RunOutcome outcome = invset::run_experiment(config, dir, workers);
    std::cout << outcome.summary;
    std::cout << (outcome.passed ? "all checks passed" : "some checks failed") << " (" << dir
              << "/report.json)\n";
    return outcome.passed ? 0 : 1;
  } catch (const invset::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
