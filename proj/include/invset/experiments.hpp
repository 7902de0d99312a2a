#pragma once

#include "invset/config.hpp"
#include "invset/io.hpp"

#include <string>

namespace invset {

struct RunOutcome {
  Json report;  // deterministic apart from report["metadata"]
  std::string summary;
  bool passed = false;
};

/// Runs the configured experiment, writing report.json, summary.txt and the
/// CSV artifacts into out_dir (created if missing).
RunOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir, int jobs);

/// Eigenvalues, split, constants and flags of a preset as text.
std::string describe(const std::string& preset_name);

}  // namespace invset
