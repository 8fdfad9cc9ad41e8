#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shg/config.hpp"

namespace shg {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"forward",        "admittance",     "linearize",
                                              "cgo-check",      "identity-check", "reconstruct"};
  return names;
}

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides config.output
  std::optional<unsigned long long> seed;
  int jobs = 1;
};

// module that raises a given error code, used in diagnostics
const char* error_module(Errc c);

// Runs one subcommand and writes report.json (plus CSV and field files) into
// the output directory. Returns 0 on success, 1 on a solver error; invalid
// configuration throws ConfigError before anything is written.
int run_experiment(const ExperimentConfig& config, const std::string& subcommand,
                   const RunOptions& opts = {});

}  // namespace shg
