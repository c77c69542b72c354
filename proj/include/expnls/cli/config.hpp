#pragma once

// Experiment configuration: a single strict JSON document.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "expnls/error.hpp"
#include "expnls/integrators.hpp"
#include "expnls/problems.hpp"

namespace expnls::cli {

/// Bad or unknown configuration entry; the message names the key.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ProblemConfig {
  std::string type;  ///< soliton1d | cubic_quintic1d | plane2d | abs_sin1d | rotating_bec2d
  std::map<std::string, double> params;  ///< complete, defaults filled in
};

struct RunConfig {
  ProblemConfig problem;
  std::vector<Axis> grid;  ///< defaults to the problem's reference grid
  std::vector<MethodSpec> methods;
  double T = 0.0;
  std::vector<double> h;  ///< one entry for run, several for converge
  std::vector<std::string> observers;  ///< mass, energy, phase_error, angular_momentum
  std::vector<double> snapshots;       ///< 2-D density snapshot times
  StepperConfig solver;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);
/// Compact dump of to_json with sorted keys.
std::string canonical(const RunConfig& config);

Grid build_grid(const RunConfig& config);
Problem build_problem(const RunConfig& config);

}  // namespace expnls::cli
