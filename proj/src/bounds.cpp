#include "dirflow/bounds.hpp"

#include <cmath>
#include <numbers>

#include "dirflow/errors.hpp"
#include "dirflow/plane.hpp"

namespace dirflow {

namespace {

constexpr double kPi = std::numbers::pi;

void require_open_angle(double theta, const char* what) {
  if (!(theta > 0.0 && theta < kPi)) throw DomainError(std::string(what) + ": angle must lie in (0, pi)");
}

double series_at(const std::vector<double>& s, double tau) {
  const double k = std::round(tau);
  if (k < 0.0 || k >= static_cast<double>(s.size())) throw DomainError("bound curve evaluated outside its steps");
  return s[static_cast<std::size_t>(k)];
}

}  // namespace

std::string kind_name(CurveKind k) {
  switch (k) {
    case CurveKind::LinearFlowLower: return "linear_flow_lower";
    case CurveKind::GDNegativeLower: return "gd_negative_lower";
    case CurveKind::GDSuffLower: return "gd_suff_lower";
    case CurveKind::DeepLowerPhase1: return "deep_lower_phase1";
    case CurveKind::DeepLowerPhase2: return "deep_lower_phase2";
    case CurveKind::DeepUpper: return "deep_upper";
    case CurveKind::ReluDiffInitLower: return "relu_diff_init_lower";
    case CurveKind::ReluGDLower: return "relu_gd_lower";
    case CurveKind::DeepNormEnvelope: return "deep_norm_envelope";
    case CurveKind::Constant: return "constant";
  }
  return "unknown";
}

double logit_envelope(double exponent) { return std::tanh(0.5 * exponent); }

double half_angle_exponent(double theta) { return -2.0 * std::log(std::abs(std::tan(0.5 * theta))); }

double BoundCurve::constant(const std::string& name) const {
  auto it = c.find(name);
  if (it == c.end()) throw ConfigError("bound curve " + label + " has no constant " + name);
  return it->second;
}

void BoundCurve::validate() const {
  for (const auto& [k, val] : c) {
    if (!std::isfinite(val)) throw DomainError("bound curve " + label + ": constant " + k + " is not finite");
  }
  if (!(span >= 0.0) || !(scale > 0.0)) throw DomainError("bound curve " + label + ": empty domain");
}

double BoundCurve::eval(double tau, int neuron) const {
  auto k = [this](const char* n) { return constant(n); };
  switch (kind) {
    case CurveKind::Constant:
      return k("value");
    case CurveKind::LinearFlowLower: {
      const double T = k("T");
      if (T > 0.0 && tau <= T) return logit_envelope(k("A1") * tau + k("B1"));
      return logit_envelope(k("A2") * std::sqrt(std::max(0.0, tau - T + k("C2"))) + k("B2"));
    }
    case CurveKind::GDNegativeLower:
    case CurveKind::GDSuffLower:
      return 1.0 - (1.0 - k("cos0")) * std::exp(-k("B") * series_at(series, tau));
    case CurveKind::DeepLowerPhase1: {
      const double base = k("A1") * tau / k("B1") + 1.0;
      return logit_envelope(std::log(k("C1")) + k("alpha") * std::log(base));
    }
    case CurveKind::DeepLowerPhase2:
      return logit_envelope(k("A2") * tau + k("B2"));
    case CurveKind::DeepUpper: {
      const double N = k("N"), D = k("D");
      return logit_envelope(k("F") * (std::pow(0.6 * tau + D, N / 2.0) - std::pow(D, N / 2.0)) + k("E"));
    }
    case CurveKind::ReluDiffInitLower:
      return logit_envelope(k("A") * std::sqrt(tau + k("B")) + k("C"));
    case CurveKind::ReluGDLower: {
      const double decay = std::exp(-k("B") * series_at(series, tau));
      return neuron == 1 ? 1.0 - (1.0 - k("cos1_0")) * decay : 1.0 - (1.0 + k("cos2_0")) * decay;
    }
    case CurveKind::DeepNormEnvelope: {
      const double N = k("N");
      if (side == Side::Upper) return std::pow(k("D") + 0.6 * tau, N / 2.0);
      return std::pow(k("B1") + k("A1") * tau, -N / (N - 2.0));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

BoundCurve linear_flow_curve(double w0_norm, double theta0, double T, double wT_norm, double thetaT, double c0) {
  require_open_angle(theta0, "linear_flow_bound");
  if (!(w0_norm > 0.0) || !(c0 > 0.0) || T < 0.0) throw DomainError("linear_flow_bound: bad arguments");
  if (T == 0.0) {
    wT_norm = w0_norm;
    thetaT = theta0;
  }
  require_open_angle(thetaT, "linear_flow_bound (phase switch)");
  BoundCurve b;
  b.kind = CurveKind::LinearFlowLower;
  b.label = "linear_flow_lower";
  b.c["T"] = T;
  b.c["A1"] = 2.0 * c0 / (kPi * w0_norm);
  b.c["B1"] = half_angle_exponent(theta0);
  b.c["A2"] = 4.0 * c0 / (std::sqrt(0.6) * kPi);
  b.c["B2"] = half_angle_exponent(thetaT) - 4.0 * c0 * wT_norm / (0.6 * kPi);
  b.c["C2"] = wT_norm * wT_norm / 0.6;
  b.validate();
  return b;
}

double linear_flow_bound(double t, double w0_norm, double theta0, double T, double wT_norm, double thetaT, double c0) {
  return linear_flow_curve(w0_norm, theta0, T, wT_norm, thetaT, c0).eval(t);
}

BoundCurve gd_negative_curve(const Schedule& s, long n_max, double w0_norm, double theta0, double c0) {
  require_open_angle(theta0, "gd_negative_bound");
  if (std::cos(theta0) >= 0.0) throw DomainError("gd_negative_bound: needs v^T w(0) < 0");
  BoundCurve b;
  b.kind = CurveKind::GDNegativeLower;
  b.label = "gd_negative_lower";
  b.c["A"] = w0_norm * w0_norm / (c0 * c0);
  b.c["B"] = (1.0 + std::cos(theta0)) / kPi;
  b.c["cos0"] = std::cos(theta0);
  b.series = s_minus_series(s, n_max, b.c["A"]);
  b.span = static_cast<double>(n_max);
  b.validate();
  return b;
}

double gd_negative_bound(long n, const Schedule& s, double w0_norm, double theta0, double c0) {
  return gd_negative_curve(s, n, w0_norm, theta0, c0).eval(static_cast<double>(n));
}

bool gd_suff_check(const Eigen::Vector2d& w_n, const Eigen::Vector2d& w_n1, double eta_n, double theta_n, double c0,
                   double delta) {
  const double lhs = w_n1.norm() + w_n.normalized().dot(w_n1);
  return lhs >= (1.0 + delta) * c0 * eta_n * std::cos(theta_n) / kPi;
}

BoundCurve gd_suff_curve(const Schedule& s, long n0, long n_max, double w_norm, double theta, double c0,
                         double delta) {
  require_open_angle(theta, "gd_suff_bound");
  if (!(delta > 0.0)) throw DomainError("gd_suff_bound: delta must be > 0");
  BoundCurve b;
  b.kind = CurveKind::GDSuffLower;
  b.label = "gd_suff_lower";
  b.anchor = static_cast<double>(n0);
  b.c["A"] = w_norm * w_norm / (c0 * c0);
  b.c["B"] = delta * (1.0 + std::cos(theta)) / (kPi + delta * kPi);
  b.c["C"] = 0.6 / (c0 * c0);
  b.c["cos0"] = std::cos(theta);
  b.series = s_plus_series(s.shifted(n0), n_max - n0, b.c["A"], b.c["C"]);
  b.span = static_cast<double>(n_max - n0);
  b.validate();
  return b;
}

double r1_threshold(double eta_plus, double c0) { return eta_plus * c0 + c0 * eta_plus / kPi; }

BoundCurve deep_lower_phase1_curve(int N, double w_e0_norm, double theta0, double T, double c0, ConstantForm form) {
  if (N <= 2) throw DomainError("deep bounds need N > 2");
  require_open_angle(theta0, "deep_bounds");
  BoundCurve b;
  b.kind = CurveKind::DeepLowerPhase1;
  b.label = "deep_lower_phase1";
  b.c["A1"] = (N - 2) * c0;
  b.c["B1"] = std::pow(w_e0_norm, 2.0 / N - 1.0);
  b.c["C1"] = (1.0 + std::cos(theta0)) / (1.0 - std::cos(theta0));
  b.c["alpha"] = form == ConstantForm::Printed ? 2.0 * c0 / kPi : 2.0 * c0 / (kPi * b.c["A1"]);
  b.span = T;
  b.validate();
  return b;
}

BoundCurve deep_lower_phase2_curve(int N, double T, double w_eT_norm, double theta_T, double c0, ConstantForm form) {
  if (N <= 2) throw DomainError("deep bounds need N > 2");
  require_open_angle(theta_T, "deep_bounds (phase switch)");
  BoundCurve b;
  b.kind = CurveKind::DeepLowerPhase2;
  b.label = "deep_lower_phase2";
  b.anchor = T;
  const double power = form == ConstantForm::Printed ? 2.0 - 2.0 / N : 1.0 - 2.0 / N;
  b.c["A2"] = 2.0 * c0 * std::pow(w_eT_norm, power) / kPi;
  b.c["B2"] = half_angle_exponent(theta_T);
  b.validate();
  return b;
}

BoundCurve deep_upper_curve(int N, double w_e0_norm, double theta0, double c0) {
  if (N <= 2) throw DomainError("deep bounds need N > 2");
  require_open_angle(theta0, "deep_bounds");
  BoundCurve b;
  b.kind = CurveKind::DeepUpper;
  b.side = Side::Upper;
  b.label = "deep_upper";
  b.c["N"] = N;
  b.c["D"] = std::pow(w_e0_norm, 2.0 / N);
  b.c["E"] = half_angle_exponent(theta0);
  b.c["F"] = 4.0 * c0 / (0.6 * N * kPi);
  b.validate();
  return b;
}

DeepBounds deep_bounds(double t, int N, double w_e0_norm, double theta0, double T, double w_eT_norm, double theta_T,
                       double c0) {
  DeepBounds out;
  out.upper = deep_upper_curve(N, w_e0_norm, theta0, c0).eval(t);
  if (T > 0.0 && t <= T) {
    out.lower = deep_lower_phase1_curve(N, w_e0_norm, theta0, T, c0).eval(t);
  } else {
    if (T == 0.0) {
      w_eT_norm = w_e0_norm;
      theta_T = theta0;
    }
    out.lower = deep_lower_phase2_curve(N, T, w_eT_norm, theta_T, c0).eval(t - T);
  }
  return out;
}

BoundCurve deep_norm_curve(Side side, int N, double w_e0_norm, double c0) {
  if (N <= 2) throw DomainError("deep norm envelope needs N > 2");
  if (!(w_e0_norm > 0.0)) throw DomainError("deep norm envelope needs w_e0 != 0");
  BoundCurve b;
  b.kind = CurveKind::DeepNormEnvelope;
  b.side = side;
  b.observable = Observable::Norm1;
  b.label = side == Side::Upper ? "deep_norm_upper" : "deep_norm_lower";
  b.c["N"] = N;
  b.c["D"] = std::pow(w_e0_norm, 2.0 / N);
  b.c["A1"] = (N - 2) * c0;
  b.c["B1"] = std::pow(w_e0_norm, 2.0 / N - 1.0);
  b.validate();
  return b;
}

DeepBounds deep_norm_envelope(double t, int N, double w_e0_norm, double c0) {
  return {deep_norm_curve(Side::Lower, N, w_e0_norm, c0).eval(t), deep_norm_curve(Side::Upper, N, w_e0_norm, c0).eval(t)};
}

bool different_half_planes(const Eigen::Vector2d& w1, const Eigen::Vector2d& w2, const Eigen::Vector2d& v) {
  return cross(v, w1) * cross(v, w2) < 0.0;
}

namespace {

BoundCurve relu_diff_init_from(double r0, double theta1_0, double theta2_0, double c0) {
  const double m = std::max(theta1_0, kPi - theta2_0);
  require_open_angle(m, "relu_diff_init_bound");
  BoundCurve b;
  b.kind = CurveKind::ReluDiffInitLower;
  b.observable = Observable::BestOfPair;
  b.label = "relu_diff_init_lower";
  b.c["A"] = 2.0 * c0 / (kPi * std::sqrt(0.6));
  b.c["B"] = r0 * r0 / 0.6;
  b.c["C"] = -2.0 * c0 * r0 / (0.6 * kPi) + half_angle_exponent(m);
  b.validate();
  return b;
}

}  // namespace

double relu_diff_init_bound(double t, double r0, double theta1_0, double theta2_0, double c0) {
  return relu_diff_init_from(r0, theta1_0, theta2_0, c0).eval(t);
}

BoundCurve relu_diff_init_curve(const Eigen::Vector2d& w1_0, const Eigen::Vector2d& w2_0, const Eigen::Vector2d& v,
                                double c0) {
  if (!different_half_planes(w1_0, w2_0, v)) {
    throw DomainError("relu_diff_init_bound: w1(0) and w2(0) must lie in different half-planes cut by v");
  }
  const double r0 = std::sqrt(w1_0.squaredNorm() + w2_0.squaredNorm());
  return relu_diff_init_from(r0, angle(w1_0, v), angle(w2_0, v), c0);
}

BoundCurve relu_gd_curve(const Schedule& s, long n_max, const Eigen::Vector2d& w1_0, const Eigen::Vector2d& w2_0,
                         const Eigen::Vector2d& v, double c0) {
  if (!different_half_planes(w1_0, w2_0, v)) {
    throw DomainError("relu_gd_bound: w1(0) and w2(0) must lie in different half-planes cut by v");
  }
  const double c1 = cos_angle(w1_0, v), c2 = cos_angle(w2_0, v);
  BoundCurve b;
  b.kind = CurveKind::ReluGDLower;
  b.observable = Observable::PerNeuron;
  b.label = "relu_gd_lower";
  b.c["cos1_0"] = c1;
  b.c["cos2_0"] = c2;
  b.c["B"] = c0 * std::min(1.0 - c1, 1.0 + c2) / (4.0 * kPi);
  b.series = s_relu_series(s, n_max, w1_0.squaredNorm() + w2_0.squaredNorm(), c0);
  b.span = static_cast<double>(n_max);
  b.validate();
  return b;
}

double relu_gd_bound(long n, int neuron, const Schedule& s, const Eigen::Vector2d& w1_0, const Eigen::Vector2d& w2_0,
                     const Eigen::Vector2d& v, double c0) {
  return relu_gd_curve(s, n, w1_0, w2_0, v, c0).eval(static_cast<double>(n), neuron);
}

BoundCurve constant_curve(double value, Side side, Observable obs) {
  BoundCurve b;
  b.kind = CurveKind::Constant;
  b.side = side;
  b.observable = obs;
  b.label = "constant";
  b.c["value"] = value;
  return b;
}

double nu(double z, Activation act, const RadialLaw& law) {
  if (!(z > 0.0)) throw DomainError("nu: z must be > 0");
  double acc = 0.0;
  for (const auto& n : law.nodes()) {
    const double u = z * n.r;
    double diff = 0.0;
    switch (act) {
      case Activation::ReLU: diff = u; break;
      case Activation::Identity: diff = 2.0 * u; break;
      case Activation::Tanh: diff = 2.0 * std::tanh(u); break;
    }
    acc += n.p * diff;
  }
  return acc / z;
}

CertificationReport certify(const Trajectory& traj, const BoundCurve& curve, double slack) {
  CertificationReport rep;
  rep.curve = curve.label.empty() ? kind_name(curve.kind) : curve.label;
  rep.slack = slack;
  for (const auto& r : traj.records) {
    if (!curve.covers(r.t)) continue;
    const double tau = (r.t - curve.anchor) * curve.scale;
    double m = 0.0;
    const double sign = curve.side == Side::Lower ? 1.0 : -1.0;
    switch (curve.observable) {
      case Observable::Cos1: m = sign * (r.cos1 - curve.eval(tau)); break;
      case Observable::NegCos2: m = sign * (-r.cos2 - curve.eval(tau)); break;
      case Observable::Norm1: m = sign * (r.norm1 - curve.eval(tau)); break;
      case Observable::BestOfPair: m = sign * (std::max(r.cos1, -r.cos2) - curve.eval(tau)); break;
      case Observable::PerNeuron:
        m = sign * std::max(r.cos1 - curve.eval(tau, 1), -r.cos2 - curve.eval(tau, 2));
        break;
    }
    if (std::isnan(m)) m = -std::numeric_limits<double>::infinity();
    rep.t.push_back(r.t);
    rep.margin.push_back(m);
    if (m < rep.min_margin) {
      rep.min_margin = m;
      rep.worst_t = r.t;
    }
  }
  if (rep.t.empty()) throw DomainError("certify: curve " + rep.curve + " does not overlap the trajectory");
  rep.pass = rep.min_margin >= -slack;
  return rep;
}

}  // namespace dirflow
