#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "dirflow/checks.hpp"
#include "dirflow/errors.hpp"
#include "dirflow/gradient.hpp"
#include "dirflow/harness.hpp"
#include "dirflow/monte_carlo.hpp"
#include "dirflow/plane.hpp"

namespace dirflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Random plane weight with log-uniform norm in [lo, hi] and angle to v uniform in (0, pi), either side.
Eigen::Vector2d random_weight(std::mt19937_64& rng, const Eigen::Vector2d& v, double lo, double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double norm = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u(rng));
  double theta = kPi * u(rng);
  while (theta <= 0.0) theta = kPi * u(rng);
  return from_polar(norm, u(rng) < 0.5 ? theta : -theta, v);
}

Trajectory run_flow(const ModelSpec& model, std::vector<Eigen::Vector2d> w, const Eigen::Vector2d& v,
                    const RadialLaw& law, double t_end, bool audit = false, bool full_layers = false,
                    double step = 0.0) {
  FlowConfig fc;
  fc.step = step;
  fc.t_end = t_end;
  fc.audit = audit;
  fc.full_layers = full_layers;
  return flow(model, PlaneState::planar(v, std::move(w)), law, fc);
}

long sign_changes(const Trajectory& traj) {
  long changes = 0;
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    if ((traj.records[k].n >= 0.0) != (traj.records[k - 1].n >= 0.0)) ++changes;
  }
  return changes;
}

void identities(SuiteReport& rep, std::uint64_t seed) {
  const Eigen::Vector2d v(0.0, 1.0);
  std::mt19937_64 rng(seed);
  for (const RadialLaw& law : {RadialLaw::unit_circle(), RadialLaw::gaussian2d(),
                               RadialLaw::atoms({{0.5, 0.3}, {1.0, 0.5}, {3.0, 0.2}})}) {
    const double c0 = law.c0();
    double ident = 0.0, proj = 0.0, cap = -1.0;
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector2d w = random_weight(rng, v, 1e-2, 1e2);
      const LinearEval e = eval_linear(w, v, law);
      const double th = angle(w, v);
      ident = std::max(ident, std::abs(tangential_rate(w, v, e.grad) - c0 * std::sin(th) * std::sin(th) / kPi));
      const Eigen::Vector2d wb = w.normalized();
      const Eigen::Vector2d p = e.grad + (c0 / kPi) * v;
      proj = std::max(proj, (p - wb * wb.dot(p)).norm());
      cap = std::max(cap, e.grad.norm() - c0);
    }
    const std::string tag = "[" + law.label() + "]";
    rep.at_most("angle_gradient_identity" + tag, ident, 1e-8);
    rep.at_most("projection_corollary" + tag, proj, 1e-8);
    rep.at_most("gradient_norm_cap" + tag, cap, 1e-9, "max ||grad|| - c0 = " + fmt(cap));
    const MomentConstants m = law.moments();
    const Eigen::Vector2d g0 = eval_linear(Eigen::Vector2d::Zero(), v, law).grad;
    rep.at_most("gradient_at_origin" + tag, (g0 + 0.5 * m.c1 * v).norm(), 1e-12);
  }

  const RadialLaw circle = RadialLaw::unit_circle();
  double n_max = -1.0, mono = 0.0, obtuse = -1.0;
  for (double r : {0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 100; ++k) {
      const double th = 0.5 * kPi * k / 100.0;
      const double n = eval_linear(from_polar(r, th, v), v, circle).n;
      mono = std::max(mono, n - prev);
      prev = n;
      n_max = std::max(n_max, n);
    }
    for (int k = 0; k <= 50; ++k) {
      const double th = 0.5 * kPi + 0.5 * kPi * k / 50.0;
      obtuse = std::max(obtuse, eval_linear(from_polar(r, th, v), v, circle).n);
    }
  }
  rep.at_most("norm_rate_monotone_on_arcs", mono, 1e-12, "largest increase of N along an arc " + fmt(mono));
  rep.at_most("norm_rate_nonpositive_obtuse", obtuse, 1e-12);
  rep.at_most("norm_rate_cap_0.3", n_max, 0.3);

  double lemma6 = std::numeric_limits<double>::infinity(), sign1 = -1.0, sign2 = 1.0, pair_rate = -1.0;
  long lemma6_states = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector2d w1 = random_weight(rng, v, 1e-2, 1e2), w2 = random_weight(rng, v, 1e-2, 1e2);
    const ReluEval e = eval_relu(w1, w2, v, circle);
    sign1 = std::max(sign1, v.dot(e.grad1));
    sign2 = std::min(sign2, v.dot(e.grad2));
    pair_rate = std::max(pair_rate, 2.0 * e.n);
    if (cross(w1, w2) * cross(w1, v) > 0.0) {
      const double th = angle(w1, v);
      lemma6 = std::min(lemma6, tangential_rate(w1, v, e.grad1) - circle.c0() * std::sin(th) * std::sin(th) / (2 * kPi));
      ++lemma6_states;
    }
  }
  rep.add({"relu_half_plane_inequality", lemma6 >= -1e-10, lemma6,
           "min slack " + fmt(lemma6) + " over " + std::to_string(lemma6_states) + " states"});
  rep.add({"relu_gradient_signs", sign1 < 0.0 && sign2 > 0.0, std::min(-sign1, sign2),
           "max v.grad1 " + fmt(sign1) + ", min v.grad2 " + fmt(sign2)});
  rep.at_most("relu_pair_norm_rate_cap", pair_rate, 0.6 + 1e-9);
  rep.at_most("nu_relu_equals_c0", std::abs(nu(0.7, Activation::ReLU, circle) - circle.c0()), 1e-15);

  {
    const int N = 4;
    const Eigen::Vector2d w(0.6, -0.8);
    const Eigen::Vector2d vel = grad_deep_effective(w, v, N, circle);
    const double th = angle(w, v);
    const double rate = (v - w.normalized() * w.normalized().dot(v)).dot(vel) / w.norm();
    const double expect = circle.c0() * std::sin(th) * std::sin(th) / kPi * std::pow(w.norm(), 1.0 - 2.0 / N);
    rep.at_most("deep_angle_rate", std::abs(rate - expect), 1e-10);
  }

  {
    const RadialLaw a = RadialLaw::atoms({{1.0, 0.25}, {2.0, 0.5}, {1.0, 0.25}});
    const RadialLaw b = RadialLaw::atoms({{2.0, 0.5}, {1.0, 0.5}});
    const MomentConstants ma = a.moments(), mb = b.moments();
    rep.at_most("moments_merge_reorder_invariant",
                std::max({std::abs(ma.c0 - mb.c0), std::abs(ma.c1 - mb.c1), std::abs(ma.c2 - mb.c2)}), 1e-15);
  }
  {
    const RadialLaw g = RadialLaw::gaussian2d();
    double worst = 0.0;
    for (int d : {2, 5, 20}) {
      const McEstimate e = monte_carlo_mean(g, d, 1, 200000, seed + d, [](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> o) {
        o(0) = x.head<2>().norm();
      });
      worst = std::max(worst, std::abs(e.mean(0) - g.c0()) / e.se(0));
    }
    rep.at_most("dimension_free_marginal_sigmas", worst, 4.0);
  }
  {
    double worst = 0.0;
    const Eigen::VectorXd vx = v;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d w = random_weight(rng, v, 0.1, 10.0), w2 = random_weight(rng, v, 0.1, 10.0);
      const McEstimate lin = monte_carlo_grad(ModelSpec::linear(), {Eigen::VectorXd(w)}, vx, circle, 200000, seed + i);
      const Eigen::Vector2d g = eval_linear(w, v, circle).grad;
      const McEstimate deep =
          monte_carlo_grad(ModelSpec::deep_linear(4), {Eigen::VectorXd(w)}, vx, circle, 200000, seed + 10 + i);
      const Eigen::Vector2d gd4 = grad_deep_effective(w, v, 4, circle);
      const McEstimate relu =
          monte_carlo_grad(ModelSpec::two_neuron_relu(), {Eigen::VectorXd(w), Eigen::VectorXd(w2)}, vx, circle, 200000,
                           seed + 20 + i);
      const ReluEval re = eval_relu(w, w2, v, circle);
      Eigen::VectorXd rq(4);
      rq << re.grad1, re.grad2;
      worst = std::max(worst, ((lin.mean - g).cwiseAbs().array() / lin.se.array()).maxCoeff());
      worst = std::max(worst, ((deep.mean - gd4).cwiseAbs().array() / deep.se.array()).maxCoeff());
      worst = std::max(worst, ((relu.mean - rq).cwiseAbs().array() / relu.se.array().max(1e-300)).maxCoeff());
    }
    rep.at_most("quadrature_vs_monte_carlo_sigmas", worst, 4.0);
  }
}

void bounds_suite(SuiteReport& rep) {
  const RadialLaw law = RadialLaw::unit_circle();
  const double c0 = law.c0();
  const Eigen::Vector2d v(0.0, 1.0), w0(0.6, -0.8);
  const Trajectory tr = run_flow(ModelSpec::linear(), {w0}, v, law, 30.0, true);
  const PhaseSwitch ps = find_phase_switch(tr, law);
  rep.expect("phase_switch_found", ps.found, "T = " + fmt(ps.T) + ", N(T) = " + fmt(ps.n_at_T));
  rep.at_most("integrator_step_halving", tr.audit_delta, 1e-9);
  const BoundCurve curve = linear_flow_curve(w0.norm(), angle(w0, v), ps.T, ps.w_T.norm(), ps.theta_T, c0);
  rep.add(certification_check(certify(tr, curve, 1e-9)));
  rep.at_most("norm_rate_sign_changes", static_cast<double>(sign_changes(tr)), 1.0);
  {
    const Eigen::Vector2d g = eval_linear(ps.w_T, v, law).grad;
    rep.add({"cos_rate_at_phase_switch", -v.dot(g) >= 0.0, -v.dot(g), "-v.grad L(w(T)) = " + fmt(-v.dot(g))});
  }
  for (double extra : {0.0, 2.0, 5.0}) {
    const double t0 = ps.T + extra;
    const Record& r = *std::find_if(tr.records.begin(), tr.records.end(), [&](const Record& a) { return a.t >= t0; });
    BoundCurve re = linear_flow_curve(r.norm1, angle(r.w[0], v), 0.0, r.norm1, angle(r.w[0], v), c0);
    re.anchor = r.t;
    re.label = "phase2_restart@" + fmt(r.t);
    rep.add(certification_check(certify(tr, re, 1e-9)));
  }
  {
    BoundCurve bad = curve;
    bad.c["A1"] *= 1.5;
    const CertificationReport r = certify(tr, bad, 1e-9);
    rep.add({"negative_control_inflated_A1_rejected", !r.pass, -r.min_margin,
             "inflated curve min margin " + fmt(r.min_margin)});
  }

  // Anchor identity and monotonicity for every curve family.
  {
    double anchor_err = 0.0, drop = 0.0;
    auto probe = [&](const BoundCurve& c, double expect, double horizon, int neuron = 1) {
      anchor_err = std::max(anchor_err, std::abs(c.eval(0.0, neuron) - expect));
      double prev = c.eval(0.0, neuron);
      for (int k = 1; k <= 200; ++k) {
        const double x = c.series.empty() ? horizon * k / 200.0 : std::floor(horizon * k / 200.0);
        const double y = c.eval(x, neuron);
        drop = std::max(drop, prev - y);
        prev = y;
      }
    };
    const double th = 2.0;
    probe(linear_flow_curve(0.7, th, 3.0, 0.4, 1.5, c0), std::cos(th), 3.0);
    probe(linear_flow_curve(0.7, th, 0.0, 0.7, th, c0), std::cos(th), 30.0);
    probe(deep_lower_phase1_curve(4, 0.7, th, 5.0, c0), std::cos(th), 5.0);
    probe(deep_lower_phase2_curve(4, 0.0, 0.7, th, c0), std::cos(th), 30.0);
    probe(gd_negative_curve(Schedule::constant(0.1), 500, 0.7, th, c0), std::cos(th), 500.0);
    probe(gd_suff_curve(Schedule::constant(0.1), 0, 500, 0.7, 1.0, c0, 1.0), std::cos(1.0), 500.0);
    probe(relu_diff_init_curve(from_polar(1.0, 1.0, v), from_polar(1.0, 1.0 - kPi, v), v, c0), std::cos(1.0), 30.0);
    const Eigen::Vector2d a(3, 4), b(4, -3), vx(1, 0);
    const BoundCurve rg = relu_gd_curve(Schedule::constant(1e-2), 500, a, b, vx, c0);
    probe(rg, cos_angle(a, vx), 500.0, 1);
    probe(rg, -cos_angle(b, vx), 500.0, 2);
    const BoundCurve up = deep_upper_curve(4, 0.7, th, c0);
    anchor_err = std::max(anchor_err, std::abs(up.eval(0.0) - std::cos(th)));
    rep.at_most("anchor_identity", anchor_err, 1e-12);
    rep.at_most("lower_envelopes_nondecreasing", drop, 1e-15);
  }

  // Deep linear, N = 4.
  {
    const int N = 4;
    const ModelSpec deep = ModelSpec::deep_linear(N);
    const Trajectory full = run_flow(deep, {w0}, v, law, 10.0, false, true);
    const Trajectory ind = run_flow(deep, {w0}, v, law, 10.0);
    const double rel = (full.records.back().w[0] - ind.records.back().w[0]).norm() / ind.records.back().w[0].norm();
    rep.at_most("deep_full_vs_induced_rel", rel, 1e-5);
    double bal = 0.0;
    for (const auto& r : full.records) bal = std::max(bal, r.balance);
    rep.at_most("deep_balancedness_residual", bal, 1e-6);

    const Trajectory dt = run_flow(deep, {w0}, v, law, 30.0);
    const PhaseSwitch dps = find_phase_switch(dt, law);
    const double th0 = angle(w0, v);
    for (const BoundCurve& c : {deep_lower_phase1_curve(N, 1.0, th0, dps.T, c0),
                                deep_lower_phase2_curve(N, dps.T, dps.w_T.norm(), dps.theta_T, c0),
                                deep_upper_curve(N, 1.0, th0, c0), deep_norm_curve(Side::Lower, N, 1.0, c0),
                                deep_norm_curve(Side::Upper, N, 1.0, c0)}) {
      rep.add(certification_check(certify(dt, c, 1e-9)));
    }
    const CertificationReport printed =
        certify(dt, deep_lower_phase1_curve(N, 1.0, th0, dps.T, c0, ConstantForm::Printed), 1e-9);
    rep.add({"deep_phase1_printed_alpha_is_not_a_bound", !printed.pass, -printed.min_margin,
             "printed alpha = 2c0/pi curve min margin " + fmt(printed.min_margin) + " at t=" + fmt(printed.worst_t)});
  }
}

void gd_suite(SuiteReport& rep) {
  const RadialLaw law = RadialLaw::unit_circle();
  const double c0 = law.c0();
  const Eigen::Vector2d v(0.0, 1.0), w0(0.6, -0.8);
  for (const Schedule& s : {Schedule::constant(1e-3), Schedule::power(1.0, -0.25), Schedule::geometric(1e-3, 1.01)}) {
    GdConfig g;
    g.steps = 20000;
    g.schedule = s;
    g.diagnostics = false;
    g.stop_when = [](const Record& r) { return r.cos1 >= 0.0; };
    const Trajectory tr = gd(ModelSpec::linear(), PlaneState::planar(v, {w0}), law, g);
    const double until = tr.records.back().t;
    rep.expect("negative_phase_ends[" + s.describe() + "]", tr.records.back().cos1 >= 0.0,
               "cos theta >= 0 at n = " + fmt(until));
    BoundCurve c = gd_negative_curve(s, g.steps, w0.norm(), angle(w0, v), c0);
    c.span = until;
    c.label += "[" + s.describe() + "]";
    rep.add(certification_check(certify(tr, c, 0.0)));
    double drop = 0.0;
    for (std::size_t k = 1; k < tr.records.size(); ++k) {
      drop = std::max(drop, v.dot(tr.records[k - 1].w[0]) - v.dot(tr.records[k].w[0]));
    }
    rep.at_most("projection_increasing[" + s.describe() + "]", drop, 0.0);
  }
  {
    const double eta = 0.5;
    const Schedule s = Schedule::constant(eta);
    GdConfig g;
    g.steps = 5000;
    g.schedule = s;
    g.diagnostics = false;
    const Trajectory tr = gd(ModelSpec::linear(), PlaneState::planar(v, {w0}), law, g);
    const double R1 = r1_threshold(eta, c0);
    std::size_t n0 = tr.records.size();
    for (std::size_t k = 0; k < tr.records.size(); ++k) {
      if (tr.records[k].norm1 * tr.records[k].cos1 >= R1) {
        n0 = k;
        break;
      }
    }
    rep.expect("sufficient_condition_triggered", n0 < tr.records.size(), "R1 = " + fmt(R1) + ", n0 = " + fmt(n0));
    if (n0 < tr.records.size()) {
      long fails = 0;
      for (std::size_t k = n0; k + 1 < tr.records.size(); ++k) {
        const auto& a = tr.records[k];
        if (!gd_suff_check(a.w[0], tr.records[k + 1].w[0], eta, angle(a.w[0], v), c0, 1.0)) ++fails;
      }
      rep.at_most("eq1_delta1_failures_after_n0", static_cast<double>(fails), 0.0);
      const Record& a = tr.records[n0];
      rep.add(certification_check(
          certify(tr, gd_suff_curve(s, static_cast<long>(n0), g.steps, a.norm1, angle(a.w[0], v), c0, 1.0), 0.0)));
      rep.expect("converges", tr.records.back().cos1 > 0.99, "final cos " + fmt(tr.records.back().cos1));
    }
  }
  {
    // Partial-sum growth: geometric q > 1 grows linearly, constant like sqrt(n).
    const Schedule geo = Schedule::geometric(1e-3, 1.01), cst = Schedule::constant(1.0);
    const double g1 = s_minus(geo, 2000, 1.0), g2 = s_minus(geo, 4000, 1.0);
    const double r_geo = (g2 - g1) / g1;
    rep.add({"geometric_s_minus_linear_growth", r_geo > 0.5 && r_geo < 1.5, 0.5 - std::abs(r_geo - 1.0),
             "(S_4000 - S_2000) / S_2000 = " + fmt(r_geo)});
    const double c1 = s_minus(cst, 10000, 1.0), c2 = s_minus(cst, 40000, 1.0);
    rep.add({"constant_s_minus_sqrt_growth", std::abs(c2 / c1 - 2.0) < 0.1, 0.1 - std::abs(c2 / c1 - 2.0),
             "S_40000 / S_10000 = " + fmt(c2 / c1)});
  }
}

void relu_suite(SuiteReport& rep) {
  const RadialLaw law = RadialLaw::unit_circle();
  const double c0 = law.c0();
  const Eigen::Vector2d v(1.0, 0.0);
  const ModelSpec relu = ModelSpec::two_neuron_relu();
  for (const auto& [a, b] : std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>{{{9, 1}, {9, -7}}, {{3, 4}, {4, -3}}}) {
    const std::string tag = "[(" + fmt(a.x()) + "," + fmt(a.y()) + "),(" + fmt(b.x()) + "," + fmt(b.y()) + ")]";
    const Trajectory tr = run_flow(relu, {a, b}, v, law, 100.0, false, false, 1e-2);
    BoundCurve c = relu_diff_init_curve(a, b, v, c0);
    c.label += tag;
    rep.add(certification_check(certify(tr, c, 1e-9)));
    double rate = -1.0, wrong = 0.0;
    for (std::size_t k = 0; k < tr.records.size(); ++k) {
      rate = std::max(rate, 2.0 * tr.records[k].n);
      if (k > 0) {
        wrong = std::max(wrong, v.dot(tr.records[k - 1].w[0]) - v.dot(tr.records[k].w[0]));
        wrong = std::max(wrong, v.dot(tr.records[k].w[1]) - v.dot(tr.records[k - 1].w[1]));
      }
    }
    rep.at_most("pair_norm_rate" + tag, rate, 0.6 + 1e-9);
    rep.at_most("projections_monotone" + tag, wrong, 0.0);
  }
  {
    std::vector<double> deltas{0.3, 0.03, 0.003}, times;
    bool monotone = true;
    for (double d : deltas) {
      const double th2 = kPi / 6.0, th1 = std::acos(std::cos(th2) - d);
      const Trajectory tr = run_flow(relu, {from_polar(1.0, th1, v), from_polar(1.0, th2, v)}, v, law, 20.0);
      const Crossover cr = relu_crossover_time(tr);
      rep.expect("crossover_found[delta=" + fmt(d) + "]", cr.found, "t = " + fmt(cr.t));
      monotone = monotone && cr.monotone;
      times.push_back(cr.found ? cr.t : kNaN);
    }
    rep.expect("angles_monotone_until_crossover", monotone);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      const double lr = std::pow(std::log(1.0 / deltas[k + 1]) / std::log(1.0 / deltas[k]), 2);
      worst = std::max(worst, times[k + 1] / times[k] - lr);
    }
    rep.at_most("crossover_growth_within_log_squared", worst, 0.0,
                "times " + fmt(times[0]) + ", " + fmt(times[1]) + ", " + fmt(times[2]));
  }
  {
    const Eigen::Vector2d a(3, 4), b(4, -3);
    GdConfig g;
    g.steps = 10000;
    g.schedule = Schedule::constant(1e-2);
    g.diagnostics = false;
    const Trajectory tr = gd(relu, PlaneState::planar(v, {a, b}), law, g);
    const double prefix = no_crossing_prefix(tr);
    rep.expect("no_crossing_prefix_nonempty", prefix > 0.0, "prefix " + fmt(prefix) + " steps");
    BoundCurve c = relu_gd_curve(g.schedule, g.steps, a, b, v, c0);
    c.span = prefix;
    rep.add(certification_check(certify(tr, c, 0.0)));
  }
  {
    // theta1(0) = 0: the second neuron ends up on the far side of v's normal.
    const Trajectory tr = run_flow(relu, {Eigen::Vector2d(1.0, 0.0), from_polar(1.0, 0.5, v)}, v, law, 60.0, false, false, 1e-2);
    double when = kNaN;
    for (const auto& r : tr.records) {
      if (v.dot(r.w[1]) <= 0.0) {
        when = r.t;
        break;
      }
    }
    rep.expect("second_neuron_turns_away", std::isfinite(when), "v^T w2 <= 0 at t = " + fmt(when));
  }
}

void appendix_suite(SuiteReport& rep, std::uint64_t seed) {
  const RadialLaw g = RadialLaw::gaussian2d();
  const MomentConstants m = g.moments();
  const Eigen::Vector2d v(0.0, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eta_plus = 1.0;
  long holds = 0, applicable = 0;
  double excess = std::numeric_limits<double>::infinity(), eta0_min = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = (m.c1 / m.c2) * u(rng);
    const Eigen::Vector2d w0 = from_polar(r, 2.0 * kPi * u(rng), v);
    const double gate = 4.0 * eta_plus * (m.c0 + m.c0 / kPi) / m.c1 + 4.0 / m.c2;
    const InitCheck c = init_check_one_step(w0, v, gate * (1.0 + u(rng)), eta_plus, g);
    eta0_min = c.eta0_min;
    applicable += c.applicable;
    holds += c.applicable && c.holds;
    excess = std::min(excess, c.projection - c.r1);
  }
  rep.add({"one_step_init_reaches_R1", holds == 100, excess,
           std::to_string(holds) + "/100 compliant starts, eta0 gate " + fmt(eta0_min)});
  {
    const InitCheck big = init_check_one_step(from_polar(1.5 * m.c1 / m.c2, 0.3, v), v, 20.0, eta_plus, g);
    rep.expect("one_step_init_norm_gate", !big.applicable);
    const InitCheck large = init_check_large_norm(Eigen::Vector2d(0.0, 10.0), v, eta_plus, g);
    rep.expect("large_norm_init", large.applicable && large.holds,
               "v^T w(0) = " + fmt(large.projection) + ", R1 = " + fmt(large.r1));
  }
  {
    const RadialLaw circle = RadialLaw::unit_circle();
    long viol = 0, hold = 0;
    double best = 0.0;
    for (double th : fig1_thetas()) {
      for (double r : fig1_norms()) {
        const LemmaStatus s = unit_circle_norm_lemma_check(r, th, circle);
        viol += s == LemmaStatus::Violated;
        hold += s == LemmaStatus::Holds;
        if (eval_linear(from_polar(r, th, v), v, circle).n > 0.0) best = std::max(best, r * std::sin(th));
      }
    }
    rep.add({"unit_circle_norm_lemma", viol == 0, -static_cast<double>(viol),
             std::to_string(hold) + " applicable cells, largest ||w|| sin(theta) with N > 0 is " + fmt(best)});
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "bounds", "gd", "relu", "appendix"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  SuiteReport rep{name, {}};
  if (name == "identities") {
    identities(rep, seed);
  } else if (name == "bounds") {
    bounds_suite(rep);
  } else if (name == "gd") {
    gd_suite(rep);
  } else if (name == "relu") {
    relu_suite(rep);
  } else if (name == "appendix") {
    appendix_suite(rep, seed);
  } else {
    throw ConfigError("unknown suite '" + name + "'");
  }
  return rep;
}

}  // namespace dirflow
