#include "dirflow/checks.hpp"

#include <cmath>
#include <numbers>

#include "dirflow/errors.hpp"
#include "dirflow/gradient.hpp"
#include "dirflow/plane.hpp"

namespace dirflow {

namespace {
constexpr double kPi = std::numbers::pi;
}

SignMap sign_map(const RadialLaw& law, const std::vector<double>& norms, const std::vector<double>& thetas,
                 const Eigen::Vector2d& v, const QuadratureConfig& cfg) {
  SignMap m;
  m.norms = norms;
  m.thetas = thetas;
  for (double th : thetas) {
    for (double r : norms) {
      const Eigen::Vector2d w = from_polar(r, th, v);
      const double n = eval_linear(w, v, law, cfg).n;
      m.n.push_back(n);
      m.sign.push_back(n > 0.0 ? 1 : -1);
      const double c = std::cos(th);
      if (th >= kPi / 2 && n > cfg.abs_tol) ++m.violations;
      if (c > 0.0 && r <= 2.0 * c / kPi && !(n > 0.0)) ++m.violations;
    }
  }
  return m;
}

std::vector<double> fig1_norms() {
  std::vector<double> out;
  for (int i = 1; i <= 200; ++i) out.push_back(0.05 * i);
  return out;
}

std::vector<double> fig1_thetas() {
  std::vector<double> out;
  for (int i = 0; i <= 180; ++i) out.push_back(i * kPi / 180.0);
  return out;
}

LemmaStatus unit_circle_norm_lemma_check(double w_norm, double theta, const RadialLaw& law,
                                         const QuadratureConfig& cfg) {
  const auto& nodes = law.nodes();
  const bool unit = nodes.size() == 1 && nodes[0].r == 1.0;
  if (!unit || !(theta > 0.0)) return LemmaStatus::Inapplicable;
  const double lhs = w_norm * std::sin(theta);
  if (lhs < 2.0) return LemmaStatus::Inapplicable;
  const Eigen::Vector2d v(0.0, 1.0);
  if (!(eval_linear(from_polar(w_norm, theta, v), v, law, cfg).n > 0.0)) return LemmaStatus::Inapplicable;
  return lhs <= 2.0 * std::log(4.0 * kPi / theta + 1.0) ? LemmaStatus::Holds : LemmaStatus::Violated;
}

std::string to_string(LemmaStatus s) {
  switch (s) {
    case LemmaStatus::Holds: return "holds";
    case LemmaStatus::Violated: return "violated";
    case LemmaStatus::Inapplicable: return "inapplicable";
  }
  return "unknown";
}

InitCheck init_check_large_norm(const Eigen::Vector2d& w0, const Eigen::Vector2d& v, double eta_plus,
                                const RadialLaw& law) {
  const auto m = law.moments();
  InitCheck out;
  out.r1 = eta_plus * m.c0 * (1.0 + 1.0 / kPi);
  out.projection = v.dot(w0);
  out.applicable = true;
  out.holds = out.projection >= out.r1;
  return out;
}

InitCheck init_check_one_step(const Eigen::Vector2d& w0, const Eigen::Vector2d& v, double eta0, double eta_plus,
                              const RadialLaw& law, const QuadratureConfig& cfg) {
  const auto m = law.moments();
  InitCheck out;
  out.r1 = eta_plus * m.c0 * (1.0 + 1.0 / kPi);
  out.norm_cap = m.c1 / m.c2;
  out.eta0_min = 4.0 * eta_plus * (m.c0 + m.c0 / kPi) / m.c1 + 4.0 / m.c2;
  out.applicable = w0.norm() <= out.norm_cap && eta0 >= out.eta0_min;
  if (!out.applicable) return out;
  const Eigen::Vector2d w1 = w0 - eta0 * eval_linear(w0, v, law, cfg).grad;
  out.projection = v.dot(w1);
  out.holds = out.projection >= out.r1;
  return out;
}

Crossover relu_crossover_time(const Trajectory& traj) {
  if (traj.model.kind != ModelKind::TwoNeuronReLU) throw ConfigError("relu_crossover_time: needs a ReLU trajectory");
  Crossover out;
  if (traj.records.empty()) return out;
  const auto& first = traj.records.front();
  auto theta1 = [&](const Record& r) { return angle(r.w[0], traj.v); };
  auto theta2 = [&](const Record& r) { return angle(r.w[1], traj.v); };
  if (theta1(first) < theta2(first)) throw DomainError("relu_crossover_time: needs theta1(0) >= theta2(0)");
  if (theta1(first) == theta2(first)) {
    out.found = true;
    out.t = first.t;
    return out;
  }
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const auto& a = traj.records[k - 1];
    const auto& b = traj.records[k];
    const double up1 = theta1(b) - theta1(a);
    const double down2 = theta2(a) - theta2(b);
    out.worst_step = std::max({out.worst_step, up1, down2});
    if (up1 > 1e-12 || down2 > 1e-12) out.monotone = false;
    const double da = theta1(a) - theta2(a), db = theta1(b) - theta2(b);
    if (db <= 0.0) {
      out.found = true;
      out.t = a.t + (b.t - a.t) * da / (da - db);
      return out;
    }
  }
  return out;
}

double no_crossing_prefix(const Trajectory& traj) {
  if (traj.model.kind != ModelKind::TwoNeuronReLU || traj.records.empty()) {
    throw ConfigError("no_crossing_prefix: needs a two-neuron trajectory");
  }
  const auto& first = traj.records.front();
  const double s1 = cross(traj.v, first.w[0]), s2 = cross(traj.v, first.w[1]);
  if (!(s1 * s2 < 0.0)) return -1.0;
  double last = -1.0;
  for (const auto& r : traj.records) {
    if (!(cross(traj.v, r.w[0]) * s1 > 0.0 && cross(traj.v, r.w[1]) * s2 > 0.0)) break;
    last = r.t;
  }
  return last;
}

}  // namespace dirflow
