// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "dirflow/checks.hpp"
#include "dirflow/gradient.hpp"
#include "dirflow/harness.hpp"
#include "dirflow/monte_carlo.hpp"

using namespace dirflow;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const Eigen::Vector2d kV(0.0, 1.0);
const Eigen::Vector2d kW0(0.6, -0.8);

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::Vector2d random_weight(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double norm = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u(rng));
  double theta = kPi * u(rng);
  while (theta <= 0.0) theta = kPi * u(rng);
  return from_polar(norm, u(rng) < 0.5 ? theta : -theta, kV);
}

std::vector<Eigen::Vector2d> random_states(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Vector2d> out;
  for (int i = 0; i < n; ++i) out.push_back(random_weight(rng, 1e-2, 1e2));
  return out;
}

Trajectory run_flow(const ModelSpec& model, std::vector<Eigen::Vector2d> w, const Eigen::Vector2d& v, double t_end,
                    double step = 0.0, bool full_layers = false) {
  FlowConfig fc;
  fc.t_end = t_end;
  fc.step = step;
  fc.full_layers = full_layers;
  fc.audit = false;
  return flow(model, PlaneState::planar(v, std::move(w)), RadialLaw::unit_circle(), fc);
}

Outcome angle_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  const RadialLaw law = RadialLaw::unit_circle();
  double worst = 0.0;
  for (const auto& w : random_states(1, 1000)) {
    const double th = angle(w, kV);
    const double rate = tangential_rate(w, kV, eval_linear(w, kV, law).grad);
    worst = std::max(worst, std::abs(rate - law.c0() * std::sin(th) * std::sin(th) / kPi));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-8 && secs < 10.0, "max error " + fmt(worst) + " over 1000 states in " + fmt(secs) + " s"};
}

Outcome projection_corollary() {
  const RadialLaw law = RadialLaw::unit_circle();
  double worst = 0.0;
  for (const auto& w : random_states(1, 1000)) {
    const Eigen::Vector2d wb = w.normalized();
    const Eigen::Vector2d p = eval_linear(w, kV, law).grad + (law.c0() / kPi) * kV;
    worst = std::max(worst, (p - wb * wb.dot(p)).norm());
  }
  return {worst < 1e-8, "max residual " + fmt(worst)};
}

Outcome quadrature_vs_mc() {
  const RadialLaw law = RadialLaw::unit_circle();
  const Eigen::VectorXd v = kV;
  std::mt19937_64 rng(3);
  double worst = 0.0;
  long coords = 0;
  auto z = [&](const McEstimate& e, const Eigen::VectorXd& q) {
    for (int k = 0; k < q.size(); ++k) {
      const double d = std::abs(e.mean(k) - q(k));
      worst = std::max(worst, e.se(k) > 0.0 ? d / e.se(k) : (d == 0.0 ? 0.0 : INFINITY));
      ++coords;
    }
  };
  const long n = 1000000;
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector2d w = random_weight(rng, 0.1, 10.0), w2 = random_weight(rng, 0.1, 10.0);
    z(monte_carlo_grad(ModelSpec::linear(), {Eigen::VectorXd(w)}, v, law, n, 100 + i),
      Eigen::VectorXd(eval_linear(w, kV, law).grad));
    z(monte_carlo_grad(ModelSpec::deep_linear(4), {Eigen::VectorXd(w)}, v, law, n, 200 + i),
      Eigen::VectorXd(grad_deep_effective(w, kV, 4, law)));
    const ReluEval re = eval_relu(w, w2, kV, law);
    Eigen::VectorXd q(4);
    q << re.grad1, re.grad2;
    z(monte_carlo_grad(ModelSpec::two_neuron_relu(), {Eigen::VectorXd(w), Eigen::VectorXd(w2)}, v, law, n, 300 + i), q);
  }
  return {worst <= 4.0, "largest deviation " + fmt(worst) + " SE over " + std::to_string(coords) + " coordinates"};
}

Outcome sign_map_structure() {
  const fs::path dir = fs::temp_directory_path() / "dirflow_acceptance_fig1";
  const SuiteReport rep = reproduce_fig1(dir, 7);
  std::string detail;
  for (const auto& c : rep.checks) detail += (detail.empty() ? "" : "; ") + c.id + ": " + c.detail;
  return {rep.pass(), detail};
}

long sign_changes(const Trajectory& tr) {
  long k = 0;
  for (std::size_t i = 1; i < tr.records.size(); ++i) k += (tr.records[i].n >= 0.0) != (tr.records[i - 1].n >= 0.0);
  return k;
}

Outcome linear_flow_certification() {
  const auto t0 = std::chrono::steady_clock::now();
  const RadialLaw law = RadialLaw::unit_circle();
  const Trajectory tr = run_flow(ModelSpec::linear(), {kW0}, kV, 30.0);
  const PhaseSwitch ps = find_phase_switch(tr, law);
  const BoundCurve c = linear_flow_curve(kW0.norm(), angle(kW0, kV), ps.T, ps.w_T.norm(), ps.theta_T, law.c0());
  const CertificationReport r = certify(tr, c, 1e-9);
  const long changes = sign_changes(tr);
  const double secs = seconds_since(t0);
  return {ps.found && r.pass && changes == 1 && secs < 30.0,
          "T = " + fmt(ps.T) + ", min margin " + fmt(r.min_margin) + ", N sign changes " + std::to_string(changes) +
              ", " + fmt(secs) + " s"};
}

Outcome sgd_reproduction() {
  RunConfig cfg;
  cfg.start = {kW0};
  cfg.method = "gd";
  cfg.schedule = Schedule::constant(1e-3);
  cfg.horizon = 30000;
  cfg.minibatch = true;
  cfg.batch = 1000;
  for (double a : {0.0, 5000.0}) {
    BoundRequest b;
    b.curve = "linear_flow";
    b.anchor = a;
    cfg.bounds.push_back(b);
  }
  std::vector<Trajectory> runs;
  for (std::uint64_t k = 0; k < 10; ++k) {
    cfg.seed = splitmix64(2024 + k);
    runs.push_back(run_trajectory(cfg));
  }
  double sd = 0.0;
  for (std::size_t i = 0; i < runs[0].records.size(); ++i) {
    double s = 0.0, s2 = 0.0;
    for (const auto& r : runs) {
      s += r.records[i].cos1;
      s2 += r.records[i].cos1 * r.records[i].cos1;
    }
    const double m = s / 10.0;
    sd = std::max(sd, std::sqrt(std::max(0.0, (s2 - 10.0 * m * m) / 9.0)));
  }
  const double slack = 3.0 * sd;
  bool ok = true;
  double worst = INFINITY, final_min = 1.0;
  for (const auto& r : runs) {
    for (const auto& c : build_curves(cfg, r)) {
      const CertificationReport rep = certify(r, c, slack);
      ok = ok && rep.pass;
      worst = std::min(worst, rep.min_margin);
    }
    final_min = std::min(final_min, r.records.back().cos1);
  }
  return {ok && final_min > 0.99, "slack " + fmt(slack) + ", worst margin " + fmt(worst) + ", smallest final cos " +
                                      fmt(final_min)};
}

Outcome deep_linear() {
  const RadialLaw law = RadialLaw::unit_circle();
  const int N = 4;
  const ModelSpec deep = ModelSpec::deep_linear(N);
  const Trajectory full = run_flow(deep, {kW0}, kV, 10.0, 0.0, true);
  const Eigen::Vector2d at10 = run_flow(deep, {kW0}, kV, 10.0).records.back().w[0];
  const double rel = (full.records.back().w[0] - at10).norm() / at10.norm();
  const Trajectory ind = run_flow(deep, {kW0}, kV, 30.0);
  double bal = 0.0;
  for (const auto& r : full.records) bal = std::max(bal, r.balance);
  const PhaseSwitch ps = find_phase_switch(ind, law);
  const double th0 = angle(kW0, kV), c0 = law.c0();
  bool ok = rel < 1e-5 && bal < 1e-6;
  double worst = INFINITY;
  for (const BoundCurve& c : {deep_norm_curve(Side::Lower, N, kW0.norm(), c0), deep_norm_curve(Side::Upper, N, kW0.norm(), c0),
                              deep_lower_phase1_curve(N, kW0.norm(), th0, ps.T, c0),
                              deep_lower_phase2_curve(N, ps.T, ps.w_T.norm(), ps.theta_T, c0),
                              deep_upper_curve(N, kW0.norm(), th0, c0)}) {
    const CertificationReport r = certify(ind, c, 1e-9);
    ok = ok && r.pass;
    worst = std::min(worst, r.min_margin);
  }
  const CertificationReport printed =
      certify(ind, deep_lower_phase1_curve(N, kW0.norm(), th0, ps.T, c0, ConstantForm::Printed), 1e-9);
  return {ok, "full vs induced rel " + fmt(rel) + ", balancedness " + fmt(bal) + ", worst envelope margin " + fmt(worst) +
                  " (phase-1 alpha 2c0/(pi A1); printed alpha 2c0/pi would give " + fmt(printed.min_margin) + ")"};
}

Outcome gd_negative() {
  const RadialLaw law = RadialLaw::unit_circle();
  bool ok = true;
  std::string detail;
  for (const Schedule& s : {Schedule::constant(1e-3), Schedule::power(1.0, -0.25), Schedule::geometric(1e-3, 1.01)}) {
    GdConfig g;
    g.steps = 20000;
    g.schedule = s;
    g.diagnostics = false;
    g.stop_when = [](const Record& r) { return r.cos1 >= 0.0; };
    const Trajectory tr = gd(ModelSpec::linear(), PlaneState::planar(kV, {kW0}), law, g);
    BoundCurve c = gd_negative_curve(s, g.steps, kW0.norm(), angle(kW0, kV), law.c0());
    c.span = tr.records.back().t;
    const CertificationReport r = certify(tr, c, 0.0);
    ok = ok && r.pass && tr.records.back().cos1 >= 0.0;
    detail += (detail.empty() ? "" : "; ") + s.describe() + ": " + std::to_string(r.t.size()) + " steps, min margin " +
              fmt(r.min_margin);
  }
  return {ok, detail};
}

Outcome gd_sufficient() {
  const RadialLaw law = RadialLaw::unit_circle();
  const double eta = 0.5, c0 = law.c0();
  GdConfig g;
  g.steps = 5000;
  g.schedule = Schedule::constant(eta);
  g.diagnostics = false;
  const Trajectory tr = gd(ModelSpec::linear(), PlaneState::planar(kV, {kW0}), law, g);
  const double R1 = r1_threshold(eta, c0);
  const auto it = std::find_if(tr.records.begin(), tr.records.end(),
                               [&](const Record& r) { return r.norm1 * r.cos1 >= R1; });
  if (it == tr.records.end()) return {false, "norm * cos never reached R1 = " + fmt(R1)};
  const std::size_t n0 = static_cast<std::size_t>(it - tr.records.begin());
  long fails = 0;
  for (std::size_t k = n0; k + 1 < tr.records.size(); ++k) {
    fails += !gd_suff_check(tr.records[k].w[0], tr.records[k + 1].w[0], eta, angle(tr.records[k].w[0], kV), c0, 1.0);
  }
  const CertificationReport r =
      certify(tr, gd_suff_curve(g.schedule, static_cast<long>(n0), g.steps, it->norm1, angle(it->w[0], kV), c0, 1.0), 0.0);
  return {fails == 0 && r.pass, "R1 = " + fmt(R1) + ", n0 = " + std::to_string(n0) + ", sufficient-condition failures " +
                                    std::to_string(fails) + ", envelope min margin " + fmt(r.min_margin)};
}

Outcome relu_flow_diff() {
  const RadialLaw law = RadialLaw::unit_circle();
  const Eigen::Vector2d v(1.0, 0.0);
  bool ok = true;
  double worst = INFINITY, rate = -INFINITY;
  for (const auto& [a, b] : std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>{{{3, 4}, {4, -3}}, {{9, 1}, {9, -7}}}) {
    const Trajectory tr = run_flow(ModelSpec::two_neuron_relu(), {a, b}, v, 100.0, 1e-2);
    const CertificationReport r = certify(tr, relu_diff_init_curve(a, b, v, law.c0()), 1e-9);
    ok = ok && r.pass;
    worst = std::min(worst, r.min_margin);
    for (const auto& rec : tr.records) rate = std::max(rate, 2.0 * rec.n);
  }
  return {ok && rate <= 0.6 + 1e-9, "envelope min margin " + fmt(worst) + ", max d||W||^2/dt " + fmt(rate)};
}

Outcome relu_flow_same() {
  const Eigen::Vector2d v(1.0, 0.0);
  const std::vector<double> deltas{0.3, 0.03, 0.003};
  std::vector<double> times, x;
  bool ok = true;
  for (double d : deltas) {
    const double th2 = kPi / 6.0, th1 = std::acos(std::cos(th2) - d);
    const Trajectory tr = run_flow(ModelSpec::two_neuron_relu(), {from_polar(1.0, th1, v), from_polar(1.0, th2, v)}, v, 20.0);
    const Crossover c = relu_crossover_time(tr);
    ok = ok && c.found && c.monotone;
    times.push_back(c.t);
    x.push_back(std::pow(std::log(1.0 / d), 2));
  }
  // Least squares T = a ln^2(1/delta) + b.
  const double mx = (x[0] + x[1] + x[2]) / 3.0, my = (times[0] + times[1] + times[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - mx) * (times[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double a = sxy / sxx, b = my - a * mx;
  double growth = -INFINITY;
  for (int i = 0; i + 1 < 3; ++i) growth = std::max(growth, times[i + 1] / times[i] - x[i + 1] / x[i]);
  ok = ok && growth <= 0.0;
  return {ok, "crossover times " + fmt(times[0]) + ", " + fmt(times[1]) + ", " + fmt(times[2]) + "; fit a = " + fmt(a) +
                  ", b = " + fmt(b) + "; max(T_k+1/T_k - ln^2 ratio) = " + fmt(growth)};
}

Outcome relu_gd() {
  const RadialLaw law = RadialLaw::unit_circle();
  const Eigen::Vector2d v(1.0, 0.0), a(3, 4), b(4, -3);
  GdConfig g;
  g.steps = 10000;
  g.schedule = Schedule::constant(1e-2);
  g.diagnostics = false;
  const Trajectory tr = gd(ModelSpec::two_neuron_relu(), PlaneState::planar(v, {a, b}), law, g);
  const double prefix = no_crossing_prefix(tr);
  if (prefix <= 0.0) return {false, "empty no-crossing prefix"};
  BoundCurve c = relu_gd_curve(g.schedule, g.steps, a, b, v, law.c0());
  c.span = prefix;
  const CertificationReport r = certify(tr, c, 0.0);
  return {r.pass, "prefix " + fmt(prefix) + " steps, min margin " + fmt(r.min_margin)};
}

Outcome init_methods() {
  const RadialLaw g = RadialLaw::gaussian2d();
  const MomentConstants m = g.moments();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long holds = 0, applicable = 0;
  double excess = INFINITY, gate = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2d w0 = from_polar((m.c1 / m.c2) * u(rng), 2.0 * kPi * u(rng), kV);
    gate = 4.0 * (m.c0 + m.c0 / kPi) / m.c1 + 4.0 / m.c2;
    const InitCheck c = init_check_one_step(w0, kV, gate * (1.0 + u(rng)), 1.0, g);
    applicable += c.applicable;
    holds += c.applicable && c.holds;
    excess = std::min(excess, c.projection - c.r1);
  }
  return {applicable == 100 && holds == 100, std::to_string(holds) + "/100 starts reach R1, eta0 gate " + fmt(gate) +
                                                 ", smallest v^T w(1) - R1 = " + fmt(excess)};
}

Outcome norm_lemma() {
  const RadialLaw circle = RadialLaw::unit_circle();
  long viol = 0, hold = 0;
  double best = 0.0;
  const SignMap m = sign_map(circle, fig1_norms(), fig1_thetas());
  for (std::size_t it = 0; it < m.thetas.size(); ++it) {
    for (std::size_t in = 0; in < m.norms.size(); ++in) {
      const double th = m.thetas[it], r = m.norms[in];
      const LemmaStatus s = unit_circle_norm_lemma_check(r, th, circle);
      viol += s == LemmaStatus::Violated;
      hold += s == LemmaStatus::Holds;
      if (m.at(it, in) > 0.0) best = std::max(best, r * std::sin(th));
    }
  }
  return {viol == 0, std::to_string(viol) + " violations, " + std::to_string(hold) +
                         " applicable cells; largest ||w|| sin(theta) with N > 0 is " + fmt(best)};
}

Outcome negative_control() {
  std::ostringstream log;
  CommandOptions o;
  o.out = fs::temp_directory_path() / "dirflow_acceptance_negative";
  const int code = cmd_simulate(fs::path(DIRFLOW_CONFIG_DIR) / "negative_control.json", o, log);
  std::string line;
  std::istringstream in(log.str());
  std::string fail;
  while (std::getline(in, line)) {
    if (line.rfind("FAIL", 0) == 0) fail = line;
  }
  return {code == 1, "exit " + std::to_string(code) + (fail.empty() ? "" : ": " + fail)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"angle_gradient_identity", angle_identity},
      {"projection_corollary", projection_corollary},
      {"quadrature_vs_monte_carlo", quadrature_vs_mc},
      {"sign_map_structure", sign_map_structure},
      {"linear_flow_certification", linear_flow_certification},
      {"sgd_reproduction", sgd_reproduction},
      {"deep_linear_n4", deep_linear},
      {"gd_negative_start", gd_negative},
      {"gd_sufficient_condition", gd_sufficient},
      {"relu_different_half_planes", relu_flow_diff},
      {"relu_same_half_plane", relu_flow_same},
      {"relu_gd_prefix", relu_gd},
      {"init_one_step", init_methods},
      {"unit_circle_norm_lemma", norm_lemma},
      {"negative_control", negative_control},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
