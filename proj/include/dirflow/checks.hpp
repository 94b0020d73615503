#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "dirflow/dynamics.hpp"
#include "dirflow/quadrature.hpp"
#include "dirflow/radial_law.hpp"

namespace dirflow {

struct SignMap {
  std::vector<double> norms;
  std::vector<double> thetas;
  std::vector<double> n;   // N(w), row-major over (theta, norm)
  std::vector<int> sign;   // +1 for N > 0, else -1
  long violations = 0;     // grid cells contradicting the sign structure of N
  double at(std::size_t it, std::size_t in) const { return n[it * norms.size() + in]; }
};

// Quadrature N on a polar grid around v (theta measured from v).
SignMap sign_map(const RadialLaw& law, const std::vector<double>& norms, const std::vector<double>& thetas,
                 const Eigen::Vector2d& v = {0.0, 1.0}, const QuadratureConfig& cfg = {});

// The plotted grid: norms 0.05..10 step 0.05, theta 0..180 degrees step 1.
std::vector<double> fig1_norms();
std::vector<double> fig1_thetas();

enum class LemmaStatus { Holds, Violated, Inapplicable };

// ||w|| sin(theta) <= 2 ln(4 pi / theta + 1) on the unit circle, where N(w) > 0
// and ||w|| sin(theta) >= 2.
LemmaStatus unit_circle_norm_lemma_check(double w_norm, double theta, const RadialLaw& law,
                                         const QuadratureConfig& cfg = {});
std::string to_string(LemmaStatus s);

struct InitCheck {
  bool applicable = false;  // gates met
  bool holds = false;       // v^T w(k) >= R1 after the method's steps
  double r1 = 0.0;
  double projection = 0.0;  // v^T w(0) for method 1, v^T w(1) for method 2
  double norm_cap = 0.0;    // c1 / c2
  double eta0_min = 0.0;    // 4 eta_+ (c0 + c0/pi) / c1 + 4 / c2
};

// Method 1: v^T w(0) >= R1 directly.
InitCheck init_check_large_norm(const Eigen::Vector2d& w0, const Eigen::Vector2d& v, double eta_plus,
                                const RadialLaw& law);
// Method 2: small start plus a large first step; executes that step.
InitCheck init_check_one_step(const Eigen::Vector2d& w0, const Eigen::Vector2d& v, double eta0, double eta_plus,
                              const RadialLaw& law, const QuadratureConfig& cfg = {});

struct Crossover {
  bool found = false;
  double t = 0.0;
  bool monotone = true;     // theta1 nonincreasing and theta2 nondecreasing until crossing
  double worst_step = 0.0;  // largest wrong-way step seen
};

// First t with theta1(t) <= theta2(t), interpolated between records.
Crossover relu_crossover_time(const Trajectory& traj);

// Last record time up to which both neurons stay on their starting sides of the
// line through v (so the pair stays in different half-planes); -1 if the start
// already violates this.
double no_crossing_prefix(const Trajectory& traj);

}  // namespace dirflow
