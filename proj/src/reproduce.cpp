#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "dirflow/checks.hpp"
#include "dirflow/errors.hpp"
#include "dirflow/gradient.hpp"
#include "dirflow/harness.hpp"
#include "dirflow/io.hpp"
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

const char* const kSeedColors[] = {"#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
                                   "#98df8a", "#9467bd", "#c5b0d5", "#8c564b", "#c49c94"};

BoundRequest bound(const std::string& curve, double anchor) {
  BoundRequest b;
  b.curve = curve;
  b.anchor = anchor;
  return b;
}

RunConfig sgd_config(const ModelSpec& model, std::uint64_t seed) {
  RunConfig cfg;
  cfg.model = model;
  cfg.v = {0.0, 1.0};
  cfg.start = {Eigen::Vector2d(0.6, -0.8)};
  cfg.method = "gd";
  cfg.schedule = Schedule::constant(1e-3);
  cfg.horizon = 30000;
  cfg.minibatch = true;
  cfg.batch = 1000;
  cfg.seed = seed;
  return cfg;
}

// Runs ten seeds, estimates the slack as three times the largest per-step
// standard deviation of cos theta, and certifies every seed.
void sgd_panel(SuiteReport& rep, const std::filesystem::path& dir, const std::string& name, RunConfig cfg,
               std::uint64_t seed, std::optional<double> slack) {
  const std::filesystem::path out = dir / name;
  std::filesystem::create_directories(out);
  std::vector<Trajectory> runs;
  for (int k = 0; k < 10; ++k) {
    cfg.seed = splitmix64(seed + static_cast<std::uint64_t>(k));
    runs.push_back(run_trajectory(cfg));
  }
  double sd_max = 0.0;
  for (std::size_t i = 0; i < runs[0].records.size(); ++i) {
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const double x = runs[k].records[i].cos1;
      const double d = x - mean;
      mean += d / static_cast<double>(k + 1);
      m2 += d * (x - mean);
    }
    sd_max = std::max(sd_max, std::sqrt(m2 / static_cast<double>(runs.size() - 1)));
  }
  const double used = slack.value_or(3.0 * sd_max);
  rep.add({name + "/slack", true, used,
           "3 x max per-step std of cos theta over 10 seeds = " + fmt(3.0 * sd_max) + (slack ? ", overridden" : "")});

  std::vector<PlotSeries> angle_series, norm_series;
  bool all_pass = true;
  double worst = std::numeric_limits<double>::infinity(), final_min = 1.0;
  std::vector<BoundCurve> first_curves;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const std::vector<BoundCurve> curves = build_curves(cfg, runs[k]);
    if (k == 0) first_curves = curves;
    for (const auto& c : curves) {
      const CertificationReport r = certify(runs[k], c, used);
      all_pass = all_pass && r.pass;
      worst = std::min(worst, r.min_margin);
    }
    final_min = std::min(final_min, runs[k].records.back().cos1);
    const std::vector<double> n = runs[k].times();
    angle_series.push_back({"seed " + std::to_string(k), n, runs[k].column(&Record::cos1), kSeedColors[k]});
    norm_series.push_back({"seed " + std::to_string(k), n, runs[k].column(&Record::norm1), kSeedColors[k]});
    if (k == 0) write_text(out / "traj.csv", trajectory_csv(runs[k]));
  }
  rep.add({name + "/curves_certified_all_seeds", all_pass, worst,
           "worst min margin " + fmt(worst) + " over " + std::to_string(runs.size()) + " seeds, slack " + fmt(used)});
  rep.add({name + "/final_alignment", final_min > 0.99, final_min - 0.99, "smallest final cos theta " + fmt(final_min)});

  const char* const colors[] = {"#d62728", "#2ca02c", "#9467bd", "#000000"};
  std::size_t ci = 0;
  for (const auto& c : first_curves) {
    PlotSeries s{c.label, {}, {}, colors[ci++ % 4], true};
    for (const auto& r : runs[0].records) {
      if (!c.covers(r.t)) continue;
      s.x.push_back(r.t);
      s.y.push_back(c.at_record(r.t));
    }
    (c.observable == Observable::Norm1 ? norm_series : angle_series).push_back(std::move(s));
  }
  write_text(out / "angle.svg",
             render_lines({name + ": cos theta(n), 10 SGD seeds", "n", "cos theta", false, false}, angle_series));
  write_text(out / "norm.svg", render_lines({name + ": ||w(n)||", "n", "norm", false, false}, norm_series));
}

}  // namespace

SuiteReport reproduce_fig1(const std::filesystem::path& dir, std::uint64_t seed) {
  SignMapConfig cfg;
  cfg.norms = fig1_norms();
  cfg.thetas = fig1_thetas();
  cfg.mc_samples = 1000;
  cfg.seed = seed;
  SuiteReport rep = run_signmap(cfg, dir);
  rep.suite = "fig1";
  return rep;
}

SuiteReport reproduce_fig2(const std::filesystem::path& dir, std::uint64_t seed, std::optional<double> slack) {
  SuiteReport rep{"fig2", {}};
  RunConfig lin = sgd_config(ModelSpec::linear(), seed);
  lin.bounds = {bound("linear_flow", 0.0), bound("linear_flow", 5000.0)};
  sgd_panel(rep, dir, "linear", lin, seed, slack);

  RunConfig deep = sgd_config(ModelSpec::deep_linear(4), seed);
  deep.bounds = {bound("deep_lower", 0.0), bound("deep_upper", 0.0), bound("deep_lower", 18000.0),
                 bound("deep_upper", 18000.0)};
  sgd_panel(rep, dir, "deep_N4", deep, seed + 1000, slack);
  return rep;
}

SuiteReport reproduce_fig3(const std::filesystem::path& dir) {
  SuiteReport rep{"fig3", {}};
  const RadialLaw law = RadialLaw::unit_circle();
  struct Scenario {
    std::string name;
    Eigen::Vector2d w1, w2;
    long steps;
    long record_every;
  };
  const Eigen::Vector2d v(1.0, 0.0);
  for (const Scenario& s : {Scenario{"diff_halfplane", {3, 4}, {4, -3}, 20000, 1},
                            Scenario{"same_halfplane", {9, 1}, {9, 7}, 200000, 10}}) {
    RunConfig cfg;
    cfg.model = ModelSpec::two_neuron_relu();
    cfg.v = v;
    cfg.start = {s.w1, s.w2};
    cfg.method = "gd";
    cfg.schedule = Schedule::constant(1e-2);
    cfg.horizon = static_cast<double>(s.steps);
    cfg.record_every = s.record_every;
    const bool diff = different_half_planes(s.w1, s.w2, v);
    rep.expect(s.name + "/geometry", diff == (s.name == "diff_halfplane"),
               diff ? "w1(0), w2(0) on opposite sides of v" : "w1(0), w2(0) on the same side of v");
    if (diff) cfg.bounds = {bound("relu_gd", 0.0)};
    const Trajectory traj = run_trajectory(cfg);
    const std::filesystem::path out = dir / s.name;
    std::filesystem::create_directories(out);
    write_text(out / "traj.csv", trajectory_csv(traj));
    const std::vector<BoundCurve> curves = build_curves(cfg, traj);
    write_plots(out, traj, curves, s.name);
    for (const auto& c : curves) {
      Check ch = certification_check(certify(traj, c, 0.0));
      ch.id = s.name + "/" + ch.id;
      ch.detail += ", no-crossing prefix " + fmt(c.anchor + c.span) + " steps";
      rep.add(ch);
    }
    const Record& last = traj.records.back();
    const double align = std::min(last.cos1, -last.cos2);
    rep.add({s.name + "/final_alignment", align > 0.99, align - 0.99,
             "final cos theta1 " + fmt(last.cos1) + ", cos theta2 " + fmt(last.cos2)});
  }
  return rep;
}

}  // namespace dirflow
