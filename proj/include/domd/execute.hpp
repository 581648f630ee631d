#pragma once

#include <string>

#include "domd/config.hpp"
#include "domd/trace.hpp"

namespace domd {

struct RunReport {
  HeaderEntries header;
  SimulationResult result;
};

/// Materializes topology, geometry and losses from the config and runs the
/// simulation. Deterministic for a fixed config.
RunReport run_experiment(const ExperimentConfig& config, int threads = 0);

/// Runs and writes <out_dir>/<run_name>.csv, returning the path. On failure
/// no partial file is left behind.
std::string execute(const ExperimentConfig& config, int threads = 0);

}  // namespace domd
