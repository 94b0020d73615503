#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dirflow/models.hpp"
#include "dirflow/plane.hpp"
#include "dirflow/quadrature.hpp"
#include "dirflow/radial_law.hpp"
#include "dirflow/schedule.hpp"

namespace dirflow {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Record {
  double t = 0.0;          // time for flows, step index for GD
  Eigen::VectorXd state;   // raw integrator state (weights or flattened layers)
  std::vector<Eigen::Vector2d> w;  // plane weights; deep models hold w_e
  double cos1 = kNaN, cos2 = kNaN;
  double norm1 = kNaN, norm2 = kNaN;
  double loss = kNaN, n = kNaN, eta = kNaN;
  double balance = kNaN;   // full-layer runs only
};

struct Trajectory {
  ModelSpec model;
  Eigen::Vector2d v{0.0, 1.0};
  std::string law_label;
  std::string method;      // "flow" or "gd"
  bool full_layers = false;
  std::vector<int> widths;
  double step = 0.0;       // flow step size
  double audit_delta = kNaN;  // |cos(t_end) at h - cos(t_end) at h/2|
  bool degenerate_ray = false;
  std::vector<Record> records;

  std::vector<double> times() const;
  std::vector<double> column(double Record::*field) const;
};

struct FlowConfig {
  double t_end = 30.0;
  double step = 0.0;           // 0 selects 1e-3 / max(1, c0)
  double record_growth = 1.05; // record gaps grow geometrically ...
  double max_record_gap = 0.05;  // ... up to this size
  bool audit = true;
  bool full_layers = false;    // deep only: integrate every layer instead of the induced flow
  std::vector<int> widths;     // deep full-layer widths; empty = defaults
  std::optional<std::uint64_t> layer_seed;
  QuadratureConfig quad;
};

struct GdConfig {
  long steps = 1000;
  Schedule schedule;
  bool minibatch = false;
  int batch = 1000;
  std::uint64_t seed = 0;
  long record_every = 1;
  bool diagnostics = true;     // quadrature loss and N at every record
  std::function<bool(const Record&)> stop_when;  // checked at each record
  std::vector<int> widths;     // deep layer widths; empty = defaults
  std::optional<std::uint64_t> layer_seed;
  QuadratureConfig quad;
};

// Vector field of the chosen model on its raw state, plus the map from raw
// state to plane weights.
struct System {
  int size = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> velocity;
  std::function<std::vector<Eigen::Vector2d>(const Eigen::VectorXd&)> weights;
  std::function<double(const Eigen::VectorXd&)> balance;  // may be empty
};

System make_system(const ModelSpec& model, const Eigen::Vector2d& v, const RadialLaw& law, const QuadratureConfig& quad,
                   bool full_layers, const std::vector<int>& widths);

Eigen::VectorXd initial_state(const ModelSpec& model, const PlaneState& start, bool full_layers,
                              const std::vector<int>& widths, std::optional<std::uint64_t> layer_seed);

Eigen::VectorXd rk4_step(const System& sys, const Eigen::VectorXd& x, double h);

Trajectory flow(const ModelSpec& model, const PlaneState& start, const RadialLaw& law, const FlowConfig& cfg);
Trajectory gd(const ModelSpec& model, const PlaneState& start, const RadialLaw& law, const GdConfig& cfg);

struct PhaseSwitch {
  double T = 0.0;
  Eigen::Vector2d w_T = Eigen::Vector2d::Zero();
  double theta_T = 0.0;
  double n_at_T = 0.0;
  bool found = false;
};

// First time N(w(t)) = 0 on a flow trajectory (T = start time if N(start) >= 0),
// refined by bisection on the quadrature N within one integrator step.
PhaseSwitch find_phase_switch(const Trajectory& traj, const RadialLaw& law, const QuadratureConfig& quad = {});

// Integrates a linear or induced deep flow from w0 until N(w) >= 0 (or t_max)
// and refines T; T is measured from the start of this integration.
PhaseSwitch phase_switch_from(const ModelSpec& model, const Eigen::Vector2d& w0, const Eigen::Vector2d& v,
                              const RadialLaw& law, double t_max, const QuadratureConfig& quad = {});

}  // namespace dirflow
