#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dirflow/checks.hpp"
#include "dirflow/dynamics.hpp"
#include "dirflow/gradient.hpp"
#include "dirflow/io.hpp"
#include "dirflow/schedule.hpp"

using namespace dirflow;
constexpr double kPi = std::numbers::pi;

namespace {

Trajectory linear_flow(const Eigen::Vector2d& w0, double t_end, bool audit = false) {
  FlowConfig fc;
  fc.t_end = t_end;
  fc.audit = audit;
  return flow(ModelSpec::linear(), PlaneState::planar({0.0, 1.0}, {w0}), RadialLaw::unit_circle(), fc);
}

}  // namespace

TEST_SUITE("dynamics") {
  const Eigen::Vector2d v(0.0, 1.0);
  const RadialLaw circle = RadialLaw::unit_circle();

  TEST_CASE("rk4 step on exponential decay") {
    System sys;
    sys.size = 1;
    sys.velocity = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); };
    Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    const double h = 0.1;
    const double err = std::abs(rk4_step(sys, x, h)(0) - std::exp(-h));
    CHECK(err < std::pow(h, 5) / 100.0);
    CHECK(err > 0.0);
  }

  TEST_CASE("linear flow records") {
    const Trajectory tr = linear_flow({0.6, -0.8}, 5.0, true);
    CHECK(tr.records.front().t == 0.0);
    CHECK(std::abs(tr.records.back().t - 5.0) < 1e-12);
    CHECK(tr.audit_delta < 1e-9);
    double proj_drop = 0.0, gap = 0.0;
    for (std::size_t k = 1; k < tr.records.size(); ++k) {
      proj_drop = std::max(proj_drop, v.dot(tr.records[k - 1].w[0]) - v.dot(tr.records[k].w[0]));
      gap = std::max(gap, tr.records[k].t - tr.records[k - 1].t);
      CHECK(tr.records[k].n <= 0.3);
    }
    CHECK(proj_drop <= 0.0);
    CHECK(gap <= 0.05 + 1e-12);
  }

  TEST_CASE("norm derivative is 2N along the flow") {
    const Trajectory tr = linear_flow({0.6, -0.8}, 3.0);
    const System sys = make_system(ModelSpec::linear(), v, circle, {}, false, {});
    const Record& r = tr.records[tr.records.size() / 2];
    const double h = 1e-4;
    const Eigen::VectorXd a = rk4_step(sys, r.state, h), b = rk4_step(sys, r.state, -h);
    const double d = (a.squaredNorm() - b.squaredNorm()) / (2 * h);
    CHECK(std::abs(d - 2.0 * r.n) < 1e-8);
  }

  TEST_CASE("full-batch GD takes exact gradient steps") {
    GdConfig g;
    g.steps = 3;
    g.schedule = Schedule::constant(0.25);
    const Eigen::Vector2d w0(0.6, -0.8);
    const Trajectory tr = gd(ModelSpec::linear(), PlaneState::planar(v, {w0}), circle, g);
    REQUIRE(tr.records.size() == 4);
    Eigen::Vector2d w = w0;
    for (int k = 1; k <= 3; ++k) {
      w -= 0.25 * eval_linear(w, v, circle).grad;
      CHECK((tr.records[k].w[0] - w).norm() < 1e-15);
      CHECK(tr.records[k].t == k);
    }
  }

  TEST_CASE("minibatch SGD is reproducible per seed") {
    GdConfig g;
    g.steps = 200;
    g.schedule = Schedule::constant(1e-2);
    g.minibatch = true;
    g.batch = 64;
    g.seed = 42;
    const PlaneState start = PlaneState::planar(v, {Eigen::Vector2d(0.6, -0.8)});
    const std::string a = trajectory_csv(gd(ModelSpec::linear(), start, circle, g));
    const std::string b = trajectory_csv(gd(ModelSpec::linear(), start, circle, g));
    g.seed = 43;
    const std::string c = trajectory_csv(gd(ModelSpec::linear(), start, circle, g));
    CHECK(a == b);
    CHECK(a != c);
  }

  TEST_CASE("gd stops on request") {
    GdConfig g;
    g.steps = 100000;
    g.schedule = Schedule::constant(1e-2);
    g.stop_when = [](const Record& r) { return r.cos1 >= 0.0; };
    const Trajectory tr = gd(ModelSpec::linear(), PlaneState::planar(v, {Eigen::Vector2d(0.6, -0.8)}), circle, g);
    CHECK(tr.records.back().cos1 >= 0.0);
    CHECK(tr.records[tr.records.size() - 2].cos1 < 0.0);
  }

  TEST_CASE("phase switch is a zero of N") {
    const Trajectory tr = linear_flow({0.6, -0.8}, 10.0);
    const PhaseSwitch ps = find_phase_switch(tr, circle);
    REQUIRE(ps.found);
    CHECK(ps.T > 0.0);
    CHECK(std::abs(ps.n_at_T) < 1e-8);
    CHECK(std::abs(eval_linear(ps.w_T, v, circle).n) < 1e-8);
    const PhaseSwitch direct = phase_switch_from(ModelSpec::linear(), {0.6, -0.8}, v, circle, 10.0);
    CHECK(std::abs(direct.T - ps.T) < 1e-6);
    // A start with N >= 0 switches immediately.
    const PhaseSwitch now = phase_switch_from(ModelSpec::linear(), {0.0, 0.1}, v, circle, 10.0);
    CHECK(now.T == 0.0);
  }

  TEST_CASE("deep full-layer flow tracks the induced flow") {
    FlowConfig fc;
    fc.t_end = 2.0;
    fc.audit = false;
    const ModelSpec deep = ModelSpec::deep_linear(3);
    const PlaneState start = PlaneState::planar(v, {Eigen::Vector2d(0.6, -0.8)});
    const Trajectory ind = flow(deep, start, circle, fc);
    fc.full_layers = true;
    fc.layer_seed = 11;
    const Trajectory full = flow(deep, start, circle, fc);
    const Eigen::Vector2d a = ind.records.back().w[0], b = full.records.back().w[0];
    CHECK((a - b).norm() / a.norm() < 1e-7);
    for (const auto& r : full.records) CHECK(r.balance < 1e-8);
  }

  TEST_CASE("relu same-half-plane neurons cross") {
    FlowConfig fc;
    fc.t_end = 10.0;
    fc.audit = false;
    const Eigen::Vector2d vx(1.0, 0.0);
    const Trajectory tr = flow(ModelSpec::two_neuron_relu(),
                               PlaneState::planar(vx, {from_polar(1.0, kPi / 3, vx), from_polar(1.0, kPi / 6, vx)}),
                               circle, fc);
    const Crossover c = relu_crossover_time(tr);
    CHECK(c.found);
    CHECK(c.monotone);
    CHECK(c.t > 0.0);
    CHECK(no_crossing_prefix(tr) == -1.0);
  }

  TEST_CASE("schedules") {
    CHECK(Schedule::power(2.0, -0.5).rate(3) == doctest::Approx(1.0));
    CHECK(Schedule::geometric(1.0, 2.0).shifted(3).rate(1) == 16.0);
    CHECK_THROWS_AS(Schedule::constant(0.0).validate(), ConfigError);
    CHECK_THROWS_AS(Schedule::geometric(1.0, -1.0).validate(), ConfigError);
    const RateRange r = rate_range(Schedule::power(1.0, -0.25), 100);
    CHECK(r.eta_plus == 1.0);
    CHECK(r.eta_minus == doctest::Approx(std::pow(100.0, -0.25)));
  }

  TEST_CASE("partial sums match direct loops") {
    const Schedule s = Schedule::power(0.5, -0.25);
    const double A = 0.7, C = 0.3, c0 = 1.2, base = 2.0;
    double q1 = 0.0, q2 = 0.0, q3 = 0.0, sm = 0.0, sp = 0.0, sr = 0.0;
    const std::vector<double> ms = s_minus_series(s, 50, A);
    for (long k = 0; k < 50; ++k) {
      const double e = s.rate(k);
      q1 += e * e;
      q2 += e * e + C * e;
      q3 += 2 * e * e * c0 * c0 + 0.6 * e;
      sm += e / std::sqrt(A + q1);
      sp += e / std::sqrt(A + q2);
      sr += e / std::sqrt(base + q3);
      CHECK(std::abs(ms[k + 1] - sm) < 1e-14);
    }
    CHECK(std::abs(s_minus(s, 50, A) - sm) < 1e-14);
    CHECK(std::abs(s_plus(s, 50, A, C) - sp) < 1e-14);
    CHECK(std::abs(s_relu(s, 50, base, c0) - sr) < 1e-14);
    CHECK(ms.front() == 0.0);
  }
}
