#pragma once

// CLI verbs. Each writes its artifacts under options.out and returns an exit
// code; configuration problems surface as ConfigError, numerical failures as
// IntegrationError / ConvergenceError.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "expnls/cli/config.hpp"

namespace expnls::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct CommandOptions {
  std::filesystem::path out = ".";
  int threads = 1;  ///< 0 = hardware concurrency
  std::ostream* log = nullptr;
};

/// 17 significant digits, round-trip exact.
std::string format_double(double v);

/// Writes run_<method>.csv per method, summary.json and optional snapshots.
int cmd_run(const RunConfig& config, const CommandOptions& options);
/// Writes converge.csv (one row per method and h, then order rows) and
/// converge_timings.json.
int cmd_converge(const RunConfig& config, const CommandOptions& options);
/// Writes coeffs.csv (per-mode a_{k,l}, b_k and regime) and coeffs_check.json.
int cmd_coeffs(const RunConfig& config, const CommandOptions& options);

/// Full command line: expnls <run|converge|coeffs> --config PATH [--out DIR] [--threads N].
int run_cli(int argc, char** argv);

}  // namespace expnls::cli
