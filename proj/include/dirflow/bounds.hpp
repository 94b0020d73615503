#pragma once

#include <Eigen/Core>

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dirflow/dynamics.hpp"
#include "dirflow/radial_law.hpp"
#include "dirflow/schedule.hpp"

namespace dirflow {

enum class CurveKind {
  LinearFlowLower,
  GDNegativeLower,
  GDSuffLower,
  DeepLowerPhase1,
  DeepLowerPhase2,
  DeepUpper,
  ReluDiffInitLower,
  ReluGDLower,
  DeepNormEnvelope,
  Constant,
};

enum class Side { Lower, Upper };

// Which trajectory quantity a curve bounds.
enum class Observable {
  Cos1,
  NegCos2,
  BestOfPair,  // max(cos theta_1, -cos theta_2)
  PerNeuron,   // max_i of (observable_i - bound_i), bound_i from eval(tau, i)
  Norm1,
};

// Closed-form envelope. Record time t maps to curve time tau = (t - anchor) * scale;
// the curve applies to records with anchor <= t <= anchor + span.
struct BoundCurve {
  CurveKind kind = CurveKind::Constant;
  Side side = Side::Lower;
  Observable observable = Observable::Cos1;
  std::map<std::string, double> c;
  double anchor = 0.0;
  double scale = 1.0;
  double span = std::numeric_limits<double>::infinity();
  std::vector<double> series;  // partial sums by step offset (GD kinds)
  std::string label;

  double eval(double tau, int neuron = 1) const;
  double at_record(double t, int neuron = 1) const { return eval((t - anchor) * scale, neuron); }
  bool covers(double t) const { return t >= anchor - 1e-12 && t <= anchor + span + 1e-12; }
  double constant(const std::string& name) const;
  void validate() const;
};

std::string kind_name(CurveKind k);

// 1 - 2/(e^E + 1), evaluated as tanh(E/2) to keep digits near 1.
double logit_envelope(double exponent);
// -2 ln |tan(theta/2)|; the exponent whose envelope equals cos(theta).
double half_angle_exponent(double theta);

// Linear flow, two phases split at the phase-switch time T (T = 0: phase 2 only).
BoundCurve linear_flow_curve(double w0_norm, double theta0, double T, double wT_norm, double thetaT, double c0);
double linear_flow_bound(double t, double w0_norm, double theta0, double T, double wT_norm, double thetaT, double c0);

// GD from a start with v^T w(0) < 0, valid until cos theta(n) >= 0.
BoundCurve gd_negative_curve(const Schedule& s, long n_max, double w0_norm, double theta0, double c0);
double gd_negative_bound(long n, const Schedule& s, double w0_norm, double theta0, double c0);

// ||w(n+1)|| + wbar(n)^T w(n+1) >= (1 + delta) c0 eta_n cos theta(n) / pi
bool gd_suff_check(const Eigen::Vector2d& w_n, const Eigen::Vector2d& w_n1, double eta_n, double theta_n, double c0,
                   double delta);
// Envelope from step anchor n0 using S^+ of the schedule shifted to n0.
BoundCurve gd_suff_curve(const Schedule& s, long n0, long n_max, double w_norm, double theta, double c0, double delta);
// eta_+ c0 + c0 eta_+ / pi
double r1_threshold(double eta_plus, double c0);

// Deep envelopes can use the constants exactly as printed or as re-derived
// from the angle and norm rates. Printed alpha = 2c0/pi overshoots the true
// phase-1 rate, derived alpha = 2c0/(pi A1); printed phase-2 A2 uses
// ||w_e(T)||^{2-2/N}, derived uses ||w_e(T)||^{1-2/N}.
enum class ConstantForm { Printed, Derived };

struct DeepBounds {
  double lower = 0.0;
  double upper = 0.0;
};
DeepBounds deep_bounds(double t, int N, double w_e0_norm, double theta0, double T, double w_eT_norm, double theta_T,
                       double c0);
BoundCurve deep_lower_phase1_curve(int N, double w_e0_norm, double theta0, double T, double c0,
                                   ConstantForm form = ConstantForm::Derived);
BoundCurve deep_lower_phase2_curve(int N, double T, double w_eT_norm, double theta_T, double c0,
                                   ConstantForm form = ConstantForm::Printed);
BoundCurve deep_upper_curve(int N, double w_e0_norm, double theta0, double c0);

DeepBounds deep_norm_envelope(double t, int N, double w_e0_norm, double c0);
BoundCurve deep_norm_curve(Side side, int N, double w_e0_norm, double c0);

// Different-half-plane flow start for the two-neuron ReLU model.
double relu_diff_init_bound(double t, double r0, double theta1_0, double theta2_0, double c0);
BoundCurve relu_diff_init_curve(const Eigen::Vector2d& w1_0, const Eigen::Vector2d& w2_0, const Eigen::Vector2d& v,
                                double c0);
bool different_half_planes(const Eigen::Vector2d& w1, const Eigen::Vector2d& w2, const Eigen::Vector2d& v);

// GD counterpart; eval(n, i) gives the bound for neuron i.
BoundCurve relu_gd_curve(const Schedule& s, long n_max, const Eigen::Vector2d& w1_0, const Eigen::Vector2d& w2_0,
                         const Eigen::Vector2d& v, double c0);
double relu_gd_bound(long n, int neuron, const Schedule& s, const Eigen::Vector2d& w1_0, const Eigen::Vector2d& w2_0,
                     const Eigen::Vector2d& v, double c0);

BoundCurve constant_curve(double value, Side side, Observable obs = Observable::Cos1);

enum class Activation { ReLU, Identity, Tanh };
// E[sigma(z||x||) - sigma(-z||x||)] / z over the radial law.
double nu(double z, Activation act, const RadialLaw& law);

struct CertificationReport {
  std::string curve;
  std::vector<double> t;
  std::vector<double> margin;  // signed: positive means the bound holds
  double min_margin = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  double slack = 0.0;
  bool pass = false;
};

CertificationReport certify(const Trajectory& traj, const BoundCurve& curve, double slack);

}  // namespace dirflow
