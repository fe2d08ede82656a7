#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace handfit::cli {

/// Bad flags or configuration file; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string model;  // container path; empty means synthetic
  std::uint64_t model_seed = 7;
  int model_vertices = 778;
  int shape_dims = 10;
  std::optional<int> poses;  // unset: the command's own default
  double max_flexion = 1.2;
  double max_abduction = 0.2;
  std::string twist = "normal";
  double twist_scale = 0.05;
  int resolution = 32;
  std::string out;
  std::string report;  // JSON report path; empty means stdout
  std::array<double, 6> weights{0.001, 10.0, 10.0, 100.0, 100.0, 10.0};
  std::string align = "raw";
  std::string scenario = "two-hand";
  int max_iters = 200;
  double step_size = 1e-2;
  int grid_refresh = 5;
  int steps = 13;
  std::string mesh_a;
  std::string mesh_b;
  std::vector<std::string> inputs;

  /// Throws UsageError on out-of-range values.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Overrides the fields present in `doc`; unknown keys are a UsageError.
void apply_json(ExperimentConfig& config, const nlohmann::json& doc);

/// Runs one invocation; args exclude the program name. Returns the exit
/// code: 0 success, 2 usage or configuration error, 3 library error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace handfit::cli
