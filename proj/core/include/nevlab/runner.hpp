#pragma once

#include <filesystem>
#include <string>

#include "nevlab/config.hpp"

namespace nevlab::runner {

inline constexpr int kExitOk = 0;           // all asserted inequalities passed
inline constexpr int kExitCheckFailed = 1;  // at least one check failed
inline constexpr int kExitBadConfig = 2;    // unusable configuration or arguments
inline constexpr int kExitNumerical = 3;    // numerical failure during the run

struct RunOptions {
  std::string subcommand;
  config::Config cfg;
  std::filesystem::path out_root = "nevlab-out";
  int threads = 0;
  bool reproducible = false;  // suppress the timestamp comment in artifacts
};

// Executes one subcommand (ode-check, bm-check, fmt, smt, defect, calibrate),
// writing CSV/SVG artifacts into out_root/<subcommand>-<confighash>/ and a
// summary to stdout. The seed lives in the config (key "seed") and is
// mandatory for the path-sampling subcommands. Throws std::invalid_argument
// for configuration errors; other exceptions indicate numerical failure.
int run(const RunOptions& opts);

}  // namespace nevlab::runner
