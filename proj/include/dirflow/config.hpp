#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dirflow/models.hpp"
#include "dirflow/radial_law.hpp"
#include "dirflow/schedule.hpp"

namespace dirflow {

inline constexpr int kConfigSchema = 1;

// One envelope to certify against the simulated trajectory.
struct BoundRequest {
  std::string curve;   // linear_flow, gd_negative, gd_suff, deep_lower, deep_upper,
                       // deep_norm_lower, deep_norm_upper, relu_diff_init, relu_gd, constant
  double anchor = 0.0; // time (flow) or step (gd) of the anchoring record
  std::map<std::string, double> set;    // constants replaced after construction
  std::map<std::string, double> scale;  // constants multiplied after construction
  std::string form = "default";         // deep curves: printed | derived | default
  double delta = 1.0;                   // gd_suff
  double value = 1.0;                   // constant
  std::string side = "upper";           // constant
};

struct RunConfig {
  RadialLaw law = RadialLaw::unit_circle();
  ModelSpec model;
  Eigen::Vector2d v{0.0, 1.0};
  std::vector<Eigen::Vector2d> start;
  std::string method = "flow";
  Schedule schedule = Schedule::constant(1e-3);
  double horizon = 30.0;      // flow end time or number of GD steps
  double step = 0.0;          // flow step; 0 = default
  bool full_layers = false;   // deep flow only
  std::vector<int> widths;
  bool minibatch = false;
  int batch = 1000;
  std::uint64_t seed = 0;
  long record_every = 1;
  std::vector<BoundRequest> bounds;
  double slack = 0.0;
};

struct SignMapConfig {
  RadialLaw law = RadialLaw::unit_circle();
  Eigen::Vector2d v{0.0, 1.0};
  std::vector<double> norms;   // defaults to the plotted grid
  std::vector<double> thetas;  // radians
  long mc_samples = 1000;      // 0 disables the Monte Carlo map
  std::uint64_t seed = 0;
};

// Both parsers throw ConfigError naming the line/column of a syntax error or
// the offending field path.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
SignMapConfig parse_signmap_config(const std::string& text);
SignMapConfig load_signmap_config(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

}  // namespace dirflow
