#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsfs/active_loop.hpp"

namespace dsfs::tools {

// Experiment configuration shared by the subcommands. Every field has a
// working default, so a config file only needs the values it changes, and
// command-line flags override whatever the file says.
struct RunConfig {
  std::string network;  // network.json path; empty means "take it from a flag"
  std::string output_dir = ".";
  int threads = 1;
  active_loop::ActiveConfig active;  // carries the root seed and train block

  // Evaluation block.
  int test_count = 1000;
  int grid_resolution = 200;
  std::vector<double> levels = {0.03, 0.1, 0.2, 0.3, 0.4};
  int windows = 2;
  int window_length = 2;
  int eval_count = 400;
};

// Parses a JSON config file. Unknown keys are rejected so a typo cannot
// silently fall back to a default. Throws IoError on any problem.
RunConfig load_run_config(const std::string& path);

// Strategy names used by the config file and the --strategy flag.
active_loop::Strategy parse_strategy(const std::string& name);

}  // namespace dsfs::tools
