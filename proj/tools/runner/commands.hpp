#pragma once

#include <string>
#include <vector>

#include "artifacts.hpp"
#include "config.hpp"

namespace randcurv::cli {

inline const std::vector<std::string> kCommands{"sample", "p2", "euler", "linf", "heat", "bounds", "qsign"};

struct RunOptions {
  unsigned workers = 1;
  std::string out_dir = ".";
};

/// Computes the command's tables (no file output).
RunRecord execute(const ExperimentConfig& config, unsigned workers);

/// execute() followed by <out>/<table>.csv for every table and
/// <out>/<command>.json. Returns the record with the written paths.
RunRecord run_command(const ExperimentConfig& config, const RunOptions& options);

}  // namespace randcurv::cli
