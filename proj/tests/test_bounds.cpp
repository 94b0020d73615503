#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dirflow/bounds.hpp"
#include "dirflow/checks.hpp"
#include "dirflow/errors.hpp"
#include "dirflow/gradient.hpp"

using namespace dirflow;
constexpr double kPi = std::numbers::pi;

namespace {

// 1 - 2 / (ratio e^x + 1) with ratio = (1 + cos) / (1 - cos).
double logit_form(double cos0, double x) {
  const double ratio = (1.0 + cos0) / (1.0 - cos0);
  return 1.0 - 2.0 / (ratio * std::exp(x) + 1.0);
}

Trajectory flat_trajectory(std::vector<double> ts, std::vector<double> cos1) {
  Trajectory tr;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    Record r;
    r.t = ts[i];
    r.cos1 = cos1[i];
    r.norm1 = 1.0;
    tr.records.push_back(r);
  }
  return tr;
}

}  // namespace

TEST_SUITE("theory_bounds") {
  const double c0 = 1.0;

  TEST_CASE("half-angle exponent inverts the envelope") {
    for (double th : {0.01, 0.5, 1.5, 2.5, 3.1}) {
      CHECK(std::abs(logit_envelope(half_angle_exponent(th)) - std::cos(th)) < 1e-13);
    }
  }

  TEST_CASE("linear flow envelope closed form") {
    const double w0 = 1.0, th0 = std::acos(-0.8), T = 2.0, wT = 0.9, thT = 1.4;
    for (double t : {0.0, 0.7, 2.0}) {
      CHECK(std::abs(linear_flow_bound(t, w0, th0, T, wT, thT, c0) - logit_form(-0.8, 2.0 * c0 * t / (kPi * w0))) < 1e-13);
    }
    for (double t : {2.5, 10.0, 100.0}) {
      const double s = t - T;
      const double x = 4.0 * c0 / (std::sqrt(0.6) * kPi) * (std::sqrt(s + wT * wT / 0.6) - wT / std::sqrt(0.6));
      CHECK(std::abs(linear_flow_bound(t, w0, th0, T, wT, thT, c0) - logit_form(std::cos(thT), x)) < 1e-13);
    }
    // T = 0 means phase 2 from the start.
    CHECK(std::abs(linear_flow_bound(0.0, 0.5, 1.0, 0.0, 0.0, 0.0, c0) - std::cos(1.0)) < 1e-14);
  }

  TEST_CASE("deep norm envelope at N = 4") {
    const DeepBounds b = deep_norm_envelope(10.0, 4, 1.0, 1.0);
    CHECK(std::abs(b.lower - 1.0 / 441.0) < 1e-15);
    CHECK(std::abs(b.upper - 49.0) < 1e-12);
  }

  TEST_CASE("deep envelopes start at cos theta0 and bracket it") {
    const double th = 2.2;
    const DeepBounds b = deep_bounds(0.0, 4, 0.8, th, 1.5, 0.7, 1.9, c0);
    CHECK(std::abs(b.lower - std::cos(th)) < 1e-13);
    CHECK(std::abs(b.upper - std::cos(th)) < 1e-13);
    for (double t : {0.5, 1.5, 4.0, 20.0}) {
      const DeepBounds d = deep_bounds(t, 4, 0.8, th, 1.5, 0.7, 1.9, c0);
      CHECK(d.lower <= d.upper);
    }
    CHECK_THROWS_AS(deep_upper_curve(2, 1.0, 1.0, c0), DomainError);
  }

  TEST_CASE("deep phase-1 alpha forms") {
    const BoundCurve printed = deep_lower_phase1_curve(4, 1.0, 2.0, 5.0, c0, ConstantForm::Printed);
    const BoundCurve derived = deep_lower_phase1_curve(4, 1.0, 2.0, 5.0, c0, ConstantForm::Derived);
    CHECK(printed.constant("alpha") == doctest::Approx(2.0 / kPi));
    CHECK(derived.constant("alpha") == doctest::Approx(1.0 / kPi));
    for (double t : {0.5, 2.0, 5.0}) CHECK(printed.eval(t) > derived.eval(t));
    // Deeper networks: the printed curve rises, the derived one falls.
    for (double t : {0.5, 2.0}) {
      double p_prev = -1.0, d_prev = 1.0;
      for (int N : {3, 4, 6, 10}) {
        const double p = deep_lower_phase1_curve(N, 1.0, 2.0, 5.0, c0, ConstantForm::Printed).eval(t);
        const double d = deep_lower_phase1_curve(N, 1.0, 2.0, 5.0, c0, ConstantForm::Derived).eval(t);
        CHECK(p > p_prev);
        CHECK(d < d_prev);
        p_prev = p;
        d_prev = d;
      }
    }
  }

  TEST_CASE("gd negative envelope uses the S- sum") {
    const Schedule s = Schedule::constant(0.1);
    const double th0 = std::acos(-0.8);
    const double B = 0.2 / kPi;
    const double S = s_minus(s, 30, 1.0);
    CHECK(std::abs(gd_negative_bound(30, s, 1.0, th0, c0) - (1.0 - 1.8 * std::exp(-B * S))) < 1e-14);
    CHECK_THROWS_AS(gd_negative_curve(s, 10, 1.0, 1.0, c0), DomainError);
  }

  TEST_CASE("sufficient condition and threshold") {
    CHECK(r1_threshold(0.5, 1.0) == doctest::Approx(0.5 + 0.5 / kPi));
    const Eigen::Vector2d w(0.0, 3.0);
    CHECK(gd_suff_check(w, w + Eigen::Vector2d(0.0, 0.1), 0.1, 0.0, c0, 1.0));
    CHECK_FALSE(gd_suff_check(w, Eigen::Vector2d(0.0, -3.0), 0.1, 0.0, c0, 1.0));
  }

  TEST_CASE("relu envelopes need different half-planes") {
    const Eigen::Vector2d v(1.0, 0.0);
    CHECK(different_half_planes({3, 4}, {4, -3}, v));
    CHECK_FALSE(different_half_planes({9, 1}, {9, 7}, v));
    CHECK_THROWS_AS(relu_diff_init_curve({9, 1}, {9, 7}, v, c0), DomainError);
    CHECK_THROWS_AS(relu_gd_curve(Schedule::constant(0.01), 10, {9, 1}, {9, 7}, v, c0), DomainError);
    const BoundCurve g = relu_gd_curve(Schedule::constant(0.01), 10, {3, 4}, {4, -3}, v, c0);
    CHECK(std::abs(g.eval(0.0, 1) - 0.6) < 1e-14);
    CHECK(std::abs(g.eval(0.0, 2) + 0.8) < 1e-14);
  }

  TEST_CASE("nu") {
    const RadialLaw law = RadialLaw::atoms({{1.0, 0.5}, {3.0, 0.5}});
    CHECK(std::abs(nu(0.3, Activation::ReLU, law) - 2.0) < 1e-14);
    CHECK(std::abs(nu(0.3, Activation::Identity, law) - 4.0) < 1e-14);
    const double tanh_nu = (0.5 * 2 * std::tanh(0.3) + 0.5 * 2 * std::tanh(0.9)) / 0.3;
    CHECK(std::abs(nu(0.3, Activation::Tanh, law) - tanh_nu) < 1e-14);
    CHECK_THROWS_AS(nu(0.0, Activation::ReLU, law), DomainError);
  }

  TEST_CASE("certification margins and windows") {
    const Trajectory tr = flat_trajectory({0, 1, 2, 3}, {0.1, 0.5, 0.4, 0.9});
    const CertificationReport ok = certify(tr, constant_curve(0.05, Side::Lower), 0.0);
    CHECK(ok.pass);
    CHECK(ok.min_margin == doctest::Approx(0.05));
    const CertificationReport bad = certify(tr, constant_curve(0.45, Side::Lower), 0.0);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_t == 0.0);
    CHECK(certify(tr, constant_curve(0.45, Side::Lower), 0.36).pass);
    CHECK(certify(tr, constant_curve(0.9, Side::Upper), 0.0).pass);
    BoundCurve later = constant_curve(0.45, Side::Lower);
    later.anchor = 3.0;
    const CertificationReport tail = certify(tr, later, 0.0);
    CHECK(tail.pass);
    CHECK(tail.t.size() == 1);
    later.anchor = 10.0;
    CHECK_THROWS_AS(certify(tr, later, 0.0), DomainError);
  }

  TEST_CASE("sign map structure on the unit circle") {
    const RadialLaw circle = RadialLaw::unit_circle();
    const SignMap m = sign_map(circle, {0.05, 0.5, 2.0, 8.0}, {0.0, kPi / 4, kPi / 2, 3 * kPi / 4, kPi});
    CHECK(m.violations == 0);
    for (std::size_t in = 0; in < m.norms.size(); ++in) {
      CHECK(m.at(2, in) <= 0.0);
      CHECK(m.at(3, in) <= 0.0);
    }
    CHECK(m.at(0, 0) > 0.0);
    CHECK(m.at(1, 0) > 0.0);
    CHECK(fig1_norms().size() == 200);
    CHECK(fig1_thetas().size() == 181);
  }

  TEST_CASE("norm lemma applicability") {
    const RadialLaw circle = RadialLaw::unit_circle();
    CHECK(unit_circle_norm_lemma_check(1.0, 0.5, circle) == LemmaStatus::Inapplicable);
    CHECK(unit_circle_norm_lemma_check(8.0, 0.3, circle) == LemmaStatus::Inapplicable);
    CHECK(to_string(LemmaStatus::Holds) != to_string(LemmaStatus::Violated));
  }

  TEST_CASE("init method gates") {
    const RadialLaw g = RadialLaw::gaussian2d();
    const Eigen::Vector2d v(0.0, 1.0);
    const double gate = 4.0 * (std::sqrt(kPi / 2) + std::sqrt(kPi / 2) / kPi) / std::sqrt(2 / kPi) + 4.0;
    const InitCheck c = init_check_one_step({0.1, 0.05}, v, gate * 1.01, 1.0, g);
    CHECK(c.eta0_min == doctest::Approx(gate));
    CHECK(c.norm_cap == doctest::Approx(std::sqrt(2 / kPi)));
    CHECK(c.applicable);
    CHECK(c.holds);
    CHECK(c.projection >= c.r1);
    CHECK_FALSE(init_check_one_step({0.1, 0.05}, v, 0.9 * gate, 1.0, g).applicable);
    const InitCheck big = init_check_large_norm({0.0, 10.0}, v, 1.0, g);
    CHECK(big.applicable);
    CHECK(big.holds);
  }
}
