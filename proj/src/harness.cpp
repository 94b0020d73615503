#include "dirflow/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "dirflow/checks.hpp"
#include "dirflow/errors.hpp"
#include "dirflow/io.hpp"
#include "dirflow/monte_carlo.hpp"
#include "dirflow/plane.hpp"

namespace dirflow {

namespace {

const char* const kPalette[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::size_t nearest_record(const Trajectory& traj, double t) {
  auto it = std::lower_bound(traj.records.begin(), traj.records.end(), t,
                             [](const Record& r, double x) { return r.t < x; });
  if (it == traj.records.end()) return traj.records.size() - 1;
  std::size_t k = static_cast<std::size_t>(it - traj.records.begin());
  if (k > 0 && std::abs(traj.records[k - 1].t - t) <= std::abs(traj.records[k].t - t)) --k;
  return k;
}

// Curve time per unit of record time: 1 for flows, eta for constant-rate GD.
double flow_time_scale(const RunConfig& cfg, const std::string& where) {
  if (cfg.method == "flow") return 1.0;
  if (cfg.schedule.kind != ScheduleKind::Constant) {
    throw ConfigError(where + ": flow-time curves on a GD run need a constant schedule");
  }
  return cfg.schedule.eta0;
}

ConstantForm form_of(const BoundRequest& b, ConstantForm fallback) {
  if (b.form == "printed") return ConstantForm::Printed;
  if (b.form == "derived") return ConstantForm::Derived;
  return fallback;
}

void apply_overrides(std::vector<BoundCurve>& curves, const BoundRequest& b, const std::string& where) {
  auto apply = [&](const std::map<std::string, double>& m, bool multiply) {
    for (const auto& [k, val] : m) {
      bool found = false;
      for (auto& c : curves) {
        auto it = c.c.find(k);
        if (it == c.c.end()) continue;
        it->second = multiply ? it->second * val : val;
        found = true;
      }
      if (!found) throw ConfigError(where + ": curve " + b.curve + " has no constant '" + k + "'");
    }
  };
  apply(b.set, false);
  apply(b.scale, true);
}

void require_model(const RunConfig& cfg, ModelKind kind, const std::string& where, const std::string& curve) {
  if (cfg.model.kind != kind) throw ConfigError(where + ": curve " + curve + " does not apply to " + cfg.model.name());
}

void require_method(const RunConfig& cfg, const std::string& method, const std::string& where,
                    const std::string& curve) {
  if (cfg.method != method) throw ConfigError(where + ": curve " + curve + " needs method " + method);
}

}  // namespace

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void SuiteReport::at_most(const std::string& id, double observed, double limit, const std::string& detail) {
  const double m = limit - observed;
  add({id, m >= 0.0, std::isnan(m) ? -std::numeric_limits<double>::infinity() : m,
       detail.empty() ? "observed " + fmt(observed) + ", limit " + fmt(limit) : detail});
}

void SuiteReport::expect(const std::string& id, bool ok, const std::string& detail) {
  add({id, ok, ok ? 0.0 : -1.0, detail});
}

std::string report_json(const SuiteReport& report) {
  nlohmann::ordered_json j;
  j["suite"] = report.suite;
  j["status"] = report.pass() ? "pass" : "fail";
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["status"] = c.pass ? "pass" : "fail";
    if (std::isfinite(c.margin)) {
      e["margin"] = c.margin;
    } else {
      e["margin"] = c.margin > 0 ? "inf" : (c.margin < 0 ? "-inf" : "nan");
    }
    e["detail"] = c.detail;
    items.push_back(std::move(e));
  }
  j["invariants"] = std::move(items);
  return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const SuiteReport& report) {
  write_text(path, report_json(report));
}

void print_report(std::ostream& os, const SuiteReport& report) {
  for (const auto& c : report.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << report.suite << "/" << c.id << "  margin " << fmt(c.margin);
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  }
  os << report.suite << ": " << (report.pass() ? "pass" : "FAIL") << "\n";
}

Check certification_check(const CertificationReport& rep) {
  return {rep.curve, rep.pass, rep.min_margin,
          "min margin " + fmt(rep.min_margin) + " at t=" + fmt(rep.worst_t) + ", slack " + fmt(rep.slack) + ", " +
              std::to_string(rep.t.size()) + " records"};
}

Trajectory run_trajectory(const RunConfig& cfg) {
  const PlaneState start = PlaneState::planar(cfg.v, cfg.start);
  if (cfg.method == "flow") {
    FlowConfig fc;
    fc.t_end = cfg.horizon;
    fc.step = cfg.step;
    fc.full_layers = cfg.full_layers;
    fc.widths = cfg.widths;
    return flow(cfg.model, start, cfg.law, fc);
  }
  GdConfig g;
  g.steps = static_cast<long>(cfg.horizon);
  g.schedule = cfg.schedule;
  g.minibatch = cfg.minibatch;
  g.batch = cfg.batch;
  g.seed = cfg.seed;
  g.record_every = cfg.record_every;
  g.widths = cfg.widths;
  return gd(cfg.model, start, cfg.law, g);
}

std::vector<BoundCurve> build_curves(const RunConfig& cfg, const Trajectory& traj) {
  if (traj.records.empty()) throw DomainError("build_curves: empty trajectory");
  const double c0 = cfg.law.c0();
  const Eigen::Vector2d& v = cfg.v;
  std::vector<BoundCurve> all;
  for (std::size_t i = 0; i < cfg.bounds.size(); ++i) {
    const BoundRequest& b = cfg.bounds[i];
    const std::string where = "bounds[" + std::to_string(i) + "]";
    if (b.anchor > traj.records.back().t) throw ConfigError(where + ": anchor lies beyond the horizon");
    const Record& r = traj.records[nearest_record(traj, b.anchor)];
    const std::string tag = "@" + fmt(r.t);
    std::vector<BoundCurve> out;

    if (b.curve == "linear_flow") {
      require_model(cfg, ModelKind::Linear, where, b.curve);
      const double s = flow_time_scale(cfg, where);
      const double t_max = (cfg.horizon - r.t) * s;
      const Eigen::Vector2d w = r.w[0];
      PhaseSwitch ps = phase_switch_from(cfg.model, w, v, cfg.law, t_max);
      if (!ps.found) {
        ps.T = t_max;
        ps.w_T = w;
        ps.theta_T = angle(w, v);
      }
      BoundCurve c = linear_flow_curve(w.norm(), angle(w, v), ps.T, ps.w_T.norm(), ps.theta_T, c0);
      c.anchor = r.t;
      c.scale = s;
      out.push_back(c);
    } else if (b.curve == "deep_lower" || b.curve == "deep_upper" || b.curve == "deep_norm_lower" ||
               b.curve == "deep_norm_upper") {
      require_model(cfg, ModelKind::DeepLinear, where, b.curve);
      const int N = cfg.model.depth;
      const double s = flow_time_scale(cfg, where);
      const Eigen::Vector2d w = r.w[0];
      if (b.curve == "deep_lower") {
        const double t_max = (cfg.horizon - r.t) * s;
        PhaseSwitch ps = phase_switch_from(ModelSpec::deep_linear(N), w, v, cfg.law, t_max);
        if (!ps.found) ps.T = t_max;
        if (ps.T > 0.0) {
          BoundCurve p1 = deep_lower_phase1_curve(N, w.norm(), angle(w, v), ps.T, c0, form_of(b, ConstantForm::Derived));
          p1.anchor = r.t;
          p1.scale = s;
          p1.span = ps.T / s;
          out.push_back(p1);
        }
        if (ps.found) {
          const bool at_start = ps.T == 0.0;
          BoundCurve p2 = deep_lower_phase2_curve(N, ps.T, at_start ? w.norm() : ps.w_T.norm(),
                                                  at_start ? angle(w, v) : ps.theta_T, c0,
                                                  form_of(b, ConstantForm::Printed));
          p2.anchor = r.t + ps.T / s;
          p2.scale = s;
          out.push_back(p2);
        }
      } else if (b.curve == "deep_upper") {
        BoundCurve c = deep_upper_curve(N, w.norm(), angle(w, v), c0);
        c.anchor = r.t;
        c.scale = s;
        out.push_back(c);
      } else {
        BoundCurve c = deep_norm_curve(b.curve == "deep_norm_upper" ? Side::Upper : Side::Lower, N, w.norm(), c0);
        c.anchor = r.t;
        c.scale = s;
        out.push_back(c);
      }
    } else if (b.curve == "gd_negative") {
      require_model(cfg, ModelKind::Linear, where, b.curve);
      require_method(cfg, "gd", where, b.curve);
      const long na = std::lround(r.t);
      const long n_max = static_cast<long>(cfg.horizon) - na;
      double until = cfg.horizon;
      for (std::size_t k = nearest_record(traj, r.t); k < traj.records.size(); ++k) {
        if (traj.records[k].cos1 >= 0.0) {
          until = traj.records[k].t;
          break;
        }
      }
      BoundCurve c = gd_negative_curve(cfg.schedule.shifted(na), n_max, r.w[0].norm(), angle(r.w[0], v), c0);
      c.anchor = r.t;
      c.span = until - r.t;
      out.push_back(c);
    } else if (b.curve == "gd_suff") {
      require_model(cfg, ModelKind::Linear, where, b.curve);
      require_method(cfg, "gd", where, b.curve);
      const long steps = static_cast<long>(cfg.horizon);
      const double R1 = r1_threshold(rate_range(cfg.schedule, steps).eta_plus, c0);
      const Record* trigger = nullptr;
      for (std::size_t k = nearest_record(traj, r.t); k < traj.records.size(); ++k) {
        if (traj.records[k].norm1 * traj.records[k].cos1 >= R1) {
          trigger = &traj.records[k];
          break;
        }
      }
      if (!trigger) throw DomainError(where + ": ||w|| cos theta never reaches R1 = " + fmt(R1));
      const long n0 = std::lround(trigger->t);
      BoundCurve c = gd_suff_curve(cfg.schedule, n0, steps, trigger->norm1, angle(trigger->w[0], v), c0, b.delta);
      out.push_back(c);
    } else if (b.curve == "relu_diff_init") {
      require_model(cfg, ModelKind::TwoNeuronReLU, where, b.curve);
      const double s = flow_time_scale(cfg, where);
      BoundCurve c = relu_diff_init_curve(r.w[0], r.w[1], v, c0);
      c.anchor = r.t;
      c.scale = s;
      out.push_back(c);
    } else if (b.curve == "relu_gd") {
      require_model(cfg, ModelKind::TwoNeuronReLU, where, b.curve);
      require_method(cfg, "gd", where, b.curve);
      const long na = std::lround(r.t);
      const double prefix = no_crossing_prefix(traj);
      if (prefix < r.t) throw DomainError(where + ": the pair crosses before the anchor");
      BoundCurve c = relu_gd_curve(cfg.schedule.shifted(na), static_cast<long>(cfg.horizon) - na, r.w[0], r.w[1], v, c0);
      c.anchor = r.t;
      c.span = prefix - r.t;
      out.push_back(c);
    } else if (b.curve == "constant") {
      out.push_back(constant_curve(b.value, b.side == "lower" ? Side::Lower : Side::Upper));
    } else {
      throw ConfigError(where + ": unknown curve " + b.curve);
    }

    apply_overrides(out, b, where);
    for (auto& c : out) {
      c.validate();
      if (c.kind != CurveKind::Constant) c.label += tag;
      if (!b.set.empty() || !b.scale.empty()) c.label += "[modified]";
      all.push_back(std::move(c));
    }
  }
  return all;
}

SuiteReport certify_all(const std::string& suite, const Trajectory& traj, const std::vector<BoundCurve>& curves,
                        double slack) {
  SuiteReport rep{suite, {}};
  const double allowance = traj.method == "flow" ? 1e-9 : 0.0;
  for (const auto& c : curves) rep.add(certification_check(certify(traj, c, slack + allowance)));
  return rep;
}

void write_plots(const std::filesystem::path& dir, const Trajectory& traj, const std::vector<BoundCurve>& curves,
                 const std::string& title) {
  const bool pair = traj.model.kind == ModelKind::TwoNeuronReLU;
  const std::vector<double> t = traj.times();
  const std::string xlabel = traj.method == "flow" ? "t" : "n";

  std::vector<PlotSeries> angle_series{{pair ? "cos theta1" : "cos theta", t, traj.column(&Record::cos1)}};
  std::vector<PlotSeries> norm_series{{pair ? "||w1||" : "||w||", t, traj.column(&Record::norm1)}};
  if (pair) {
    std::vector<double> neg = traj.column(&Record::cos2);
    for (double& x : neg) x = -x;
    angle_series.push_back({"-cos theta2", t, neg, "#ff7f0e"});
    norm_series.push_back({"||w2||", t, traj.column(&Record::norm2), "#ff7f0e"});
  }
  std::size_t color = 0;
  for (const auto& c : curves) {
    const int parts = c.observable == Observable::PerNeuron ? 2 : 1;
    for (int i = 1; i <= parts; ++i) {
      PlotSeries s{c.label + (parts == 2 ? " (neuron " + std::to_string(i) + ")" : ""), {}, {},
                   kPalette[color % std::size(kPalette)], true};
      for (const auto& r : traj.records) {
        if (!c.covers(r.t)) continue;
        s.x.push_back(r.t);
        s.y.push_back(c.at_record(r.t, i));
      }
      (c.observable == Observable::Norm1 ? norm_series : angle_series).push_back(std::move(s));
      ++color;
    }
  }
  write_text(dir / "angle.svg", render_lines({title + ": alignment", xlabel, "cosine", false, false}, angle_series));
  write_text(dir / "norm.svg", render_lines({title + ": weight norm", xlabel, "norm", false, false}, norm_series));
  write_text(dir / "loss.svg",
             render_lines({title + ": population loss", xlabel, "loss", false, false},
                          {{"L", t, traj.column(&Record::loss)}}));

  std::vector<PlotSeries> path;
  double reach = 0.0;
  for (int i = 0; i < traj.model.neurons(); ++i) {
    PlotSeries s{pair ? "w" + std::to_string(i + 1) : (traj.model.kind == ModelKind::DeepLinear ? "w_e" : "w"),
                 {}, {}, i == 0 ? "#1f77b4" : "#ff7f0e"};
    for (const auto& r : traj.records) {
      s.x.push_back(r.w[i].x());
      s.y.push_back(r.w[i].y());
      reach = std::max(reach, r.w[i].norm());
    }
    path.push_back(std::move(s));
  }
  path.push_back({"v", {0.0, traj.v.x() * reach}, {0.0, traj.v.y() * reach}, "#000000", true});
  write_text(dir / "trajectory.svg", render_lines({title + ": weight path", "x1", "x2", false, true}, path));
}

int cmd_simulate(const std::filesystem::path& config, const CommandOptions& opt, std::ostream& log) {
  std::string text;
  try {
    text = read_text(config);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
  return cmd_simulate_text(text, opt, log);
}

int cmd_simulate_text(const std::string& config_text, const CommandOptions& opt, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = parse_run_config(config_text);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.slack) cfg.slack = *opt.slack;
  try {
    std::filesystem::create_directories(opt.out);
    const Trajectory traj = run_trajectory(cfg);
    write_text(opt.out / "traj.csv", trajectory_csv(traj));
    std::vector<BoundCurve> curves;
    try {
      curves = build_curves(cfg, traj);
    } catch (const ConfigError& e) {
      log << "error: " << e.what() << "\n";
      return 2;
    } catch (const DomainError& e) {
      log << "error: " << e.what() << "\n";
      return 2;
    }
    write_plots(opt.out, traj, curves, cfg.model.name());
    log << "wrote " << traj.records.size() << " records to " << (opt.out / "traj.csv").string() << "\n";
    if (curves.empty()) return 0;
    SuiteReport rep = certify_all("simulate", traj, curves, cfg.slack);
    if (traj.method == "flow" && std::isfinite(traj.audit_delta)) {
      rep.at_most("integrator_step_halving", traj.audit_delta, 1e-9);
    }
    write_report(opt.out / "report.json", rep);
    print_report(log, rep);
    return rep.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_reproduce(const std::string& figure, const CommandOptions& opt, std::ostream& log) {
  if (figure != "fig1" && figure != "fig2" && figure != "fig3") {
    log << "error: unknown figure '" << figure << "' (expected fig1, fig2 or fig3)\n";
    return 2;
  }
  try {
    const std::filesystem::path dir = opt.out / figure;
    std::filesystem::create_directories(dir);
    const std::uint64_t seed = opt.seed.value_or(0);
    SuiteReport rep = figure == "fig1"   ? reproduce_fig1(dir, seed)
                      : figure == "fig2" ? reproduce_fig2(dir, seed, opt.slack)
                                         : reproduce_fig3(dir);
    write_report(dir / "report.json", rep);
    print_report(log, rep);
    log << "artifacts in " << dir.string() << "\n";
    return rep.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const std::string& suite, const CommandOptions& opt, std::ostream& log) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    log << "error: unknown suite '" << suite << "' (expected identities, bounds, gd, relu or appendix)\n";
    return 2;
  }
  try {
    SuiteReport rep = run_suite(suite, opt.seed.value_or(0));
    std::filesystem::create_directories(opt.out);
    write_report(opt.out / ("verify_" + suite + ".json"), rep);
    print_report(log, rep);
    return rep.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    log << "run failed: " << e.what() << "\n";
    return 1;
  }
}

SuiteReport run_signmap(const SignMapConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const SignMap sm = sign_map(cfg.law, cfg.norms, cfg.thetas, cfg.v);
  const std::size_t nn = sm.norms.size(), nt = sm.thetas.size();
  std::vector<double> mc_mean(nn * nt, kNaN), mc_se(nn * nt, kNaN);
  if (cfg.mc_samples > 0) {
    for (std::size_t it = 0; it < nt; ++it) {
      for (std::size_t in = 0; in < nn; ++in) {
        const std::size_t idx = it * nn + in;
        const Eigen::VectorXd w = from_polar(sm.norms[in], sm.thetas[it], cfg.v);
        const McEstimate e =
            monte_carlo_n_linear(w, Eigen::VectorXd(cfg.v), cfg.law, cfg.mc_samples, splitmix64(cfg.seed + idx));
        mc_mean[idx] = e.mean(0);
        mc_se[idx] = e.se(0);
      }
    }
  }
  std::ostringstream csv;
  csv << "theta_deg,norm,N_quadrature,N_mc,se_mc\n" << std::setprecision(17);
  std::vector<double> theta_deg;
  for (double th : sm.thetas) theta_deg.push_back(th * 180.0 / std::numbers::pi);
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t in = 0; in < nn; ++in) {
      const std::size_t idx = it * nn + in;
      csv << theta_deg[it] << "," << sm.norms[in] << "," << sm.n[idx] << ",";
      if (std::isfinite(mc_mean[idx])) {
        csv << mc_mean[idx] << "," << mc_se[idx];
      } else {
        csv << ",";
      }
      csv << "\n";
    }
  }
  write_text(dir / "signmap.csv", csv.str());
  write_text(dir / "signmap_quadrature.svg",
             render_sign_grid("sign of N(w), quadrature", "||w||", "theta (deg)", sm.norms, theta_deg, sm.n));

  SuiteReport rep{"signmap", {}};
  long positive = 0;
  for (double x : sm.n) positive += x > 0.0;
  rep.expect("positive_region_nonempty", positive > 0, std::to_string(positive) + " cells with N > 0");
  const bool unit_circle = cfg.law.nodes().size() == 1 && cfg.law.nodes()[0].r == 1.0;
  if (unit_circle) rep.at_most("sign_structure_violations", static_cast<double>(sm.violations), 0.0);
  if (cfg.mc_samples > 0) {
    write_text(dir / "signmap_mc.svg",
               render_sign_grid("sign of N(w), Monte Carlo", "||w||", "theta (deg)", sm.norms, theta_deg, mc_mean));
    long considered = 0, agree = 0;
    for (std::size_t idx = 0; idx < mc_mean.size(); ++idx) {
      if (!(std::abs(mc_mean[idx]) > 3.0 * mc_se[idx])) continue;
      ++considered;
      if ((mc_mean[idx] > 0.0) == (sm.n[idx] > 0.0)) ++agree;
    }
    const double frac = considered ? static_cast<double>(agree) / static_cast<double>(considered) : 1.0;
    rep.add({"mc_sign_agreement", frac >= 0.99, frac - 0.99,
             std::to_string(agree) + "/" + std::to_string(considered) + " cells with |N| > 3 SE agree"});
  }
  return rep;
}

int cmd_signmap(const std::filesystem::path& config, const CommandOptions& opt, std::ostream& log) {
  SignMapConfig cfg;
  try {
    cfg = load_signmap_config(config);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
  if (opt.seed) cfg.seed = *opt.seed;
  try {
    const SuiteReport rep = run_signmap(cfg, opt.out);
    write_report(opt.out / "report.json", rep);
    print_report(log, rep);
    return rep.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    log << "run failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dirflow
