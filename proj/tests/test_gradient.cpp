#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dirflow/gradient.hpp"
#include "dirflow/monte_carlo.hpp"

using namespace dirflow;
constexpr double kPi = std::numbers::pi;

namespace {

// Midpoint rule over the unit circle for the linear model with v = (0, 1);
// the label flips at phi = 0 and pi, which are cell edges.
struct Brute {
  double loss = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
};

Brute brute_linear(const Eigen::Vector2d& w, int cells = 200000) {
  Brute b;
  for (int i = 0; i < cells; ++i) {
    const double phi = 2.0 * kPi * (i + 0.5) / cells;
    const Eigen::Vector2d x(std::cos(phi), std::sin(phi));
    const double y = x.y() >= 0.0 ? 1.0 : -1.0;
    const double m = y * w.dot(x);
    b.loss += std::log1p(std::exp(-m));
    b.grad += -y * x / (1.0 + std::exp(m));
  }
  b.loss /= cells;
  b.grad /= cells;
  return b;
}

Brute brute_relu(const Eigen::Vector2d& w1, const Eigen::Vector2d& w2, Eigen::Vector2d& g2, int cells = 200000) {
  Brute b;
  g2.setZero();
  const Eigen::Vector2d v(1.0, 0.0);
  for (int i = 0; i < cells; ++i) {
    const double phi = 2.0 * kPi * (i + 0.5) / cells;
    const Eigen::Vector2d x(std::cos(phi), std::sin(phi));
    const double y = v.dot(x) >= 0.0 ? 1.0 : -1.0;
    const double z1 = w1.dot(x), z2 = w2.dot(x);
    const double f = std::max(z1, 0.0) - std::max(z2, 0.0);
    const double s = -y / (1.0 + std::exp(y * f));
    b.loss += std::log1p(std::exp(-y * f));
    if (z1 >= 0.0) b.grad += s * x;
    if (z2 >= 0.0) g2 -= s * x;
  }
  b.loss /= cells;
  b.grad /= cells;
  g2 /= cells;
  return b;
}

}  // namespace

TEST_SUITE("gradient_engine") {
  const Eigen::Vector2d v(0.0, 1.0);
  const RadialLaw circle = RadialLaw::unit_circle();

  TEST_CASE("values at the origin") {
    const LinearEval e = eval_linear(Eigen::Vector2d::Zero(), v, circle);
    CHECK(std::abs(e.loss - std::log(2.0)) < 1e-14);
    CHECK(std::abs(e.grad.x()) < 1e-14);
    CHECK(std::abs(e.grad.y() + 1.0 / kPi) < 1e-14);
    CHECK(e.n == 0.0);
  }

  TEST_CASE("linear loss and gradient match a brute-force angular sum") {
    for (const Eigen::Vector2d& w : {Eigen::Vector2d(0.6, -0.8), Eigen::Vector2d(3.0, 0.5), Eigen::Vector2d(-0.02, 0.01)}) {
      const Brute b = brute_linear(w);
      const LinearEval e = eval_linear(w, v, circle);
      CHECK(std::abs(e.loss - b.loss) < 1e-8);
      CHECK((e.grad - b.grad).norm() < 1e-8);
      CHECK(std::abs(e.n + w.dot(e.grad)) < 1e-15);
    }
  }

  TEST_CASE("relu loss and gradients match a brute-force angular sum") {
    // Zeros of w1, w2 and v all sit on cell edges of the brute-force grid.
    const Eigen::Vector2d w1(3.0, 3.0), w2(2.0, -2.0), vx(1.0, 0.0);
    Eigen::Vector2d g2;
    const Brute b = brute_relu(w1, w2, g2);
    const ReluEval e = eval_relu(w1, w2, vx, circle);
    CHECK(std::abs(e.loss - b.loss) < 1e-8);
    CHECK((e.grad1 - b.grad).norm() < 1e-8);
    CHECK((e.grad2 - g2).norm() < 1e-8);
  }

  TEST_CASE("equal relu neurons give a zero predictor") {
    const Eigen::Vector2d w(0.3, 2.0);
    CHECK(std::abs(eval_relu(w, w, v, circle).loss - std::log(2.0)) < 1e-14);
  }

  TEST_CASE("tangential identity at a right angle") {
    const Eigen::Vector2d w(2.0, 0.0);
    CHECK(std::abs(tangential_rate(w, v, eval_linear(w, v, circle).grad) - 1.0 / kPi) < 1e-12);
  }

  TEST_CASE("gradient along v points against v") {
    for (double r : {0.01, 1.0, 50.0}) {
      const Eigen::Vector2d g = eval_linear(r * v, v, circle).grad;
      CHECK(std::abs(g.x()) < 1e-14);
      CHECK(g.y() < 0.0);
      CHECK(g.norm() <= circle.c0());
    }
  }

  TEST_CASE("loss falls like 1/r along v") {
    double prev = eval_linear(Eigen::Vector2d::Zero(), v, circle).loss;
    for (double r : {1.0, 5.0, 20.0, 60.0}) {
      const double l = eval_linear(r * v, v, circle).loss;
      CHECK(l < prev);
      prev = l;
    }
    // r E ln(1 + e^{-r|x_2|}) -> (2/pi) int_0^inf ln(1 + e^{-u}) du = pi/6.
    CHECK(std::abs(60.0 * prev - kPi / 6.0) < 0.01);
  }

  TEST_CASE("ambient gradient lives in the plane of w and v") {
    Eigen::VectorXd w(4), vx(4);
    w << 0.3, -1.0, 0.2, 0.0;
    vx << 0.0, 0.0, 1.0, 0.0;
    const Eigen::VectorXd g = grad_linear_ambient(w, vx, circle);
    CHECK(std::abs(g(3)) < 1e-15);
    const PlaneState ps = PlaneState::from_ambient(vx, {w});
    const Eigen::Vector2d g2 = eval_linear(ps.weights2[0], ps.v2, circle).grad;
    CHECK((ps.embed(g2) - g).norm() < 1e-14);
  }

  TEST_CASE("induced velocity") {
    const Eigen::Vector2d w(0.6, -0.8);
    const Eigen::Vector2d g = eval_linear(w, v, circle).grad;
    CHECK((induced_velocity(w, g, 1) + g).norm() < 1e-15);
    CHECK_THROWS_AS(grad_deep_effective(Eigen::Vector2d::Zero(), v, 3, circle), SingularityError);
    // Radial part of the induced flow: d||w||/dt = ||w||^{2-2/N} N N(w) / ||w||.
    const int N = 4;
    const Eigen::Vector2d vel = grad_deep_effective(w, v, N, circle);
    const double radial = w.normalized().dot(vel);
    CHECK(std::abs(radial - std::pow(w.norm(), 2.0 - 2.0 / N) * N * eval_linear(w, v, circle).n / w.norm()) < 1e-14);
  }

  TEST_CASE("quadrature agrees with monte carlo") {
    const Eigen::VectorXd vx = v;
    const Eigen::Vector2d w(1.2, -0.4), w2(-0.5, 0.9);
    const McEstimate lin = monte_carlo_grad(ModelSpec::linear(), {Eigen::VectorXd(w)}, vx, circle, 200000, 3);
    const Eigen::Vector2d g = eval_linear(w, v, circle).grad;
    for (int k = 0; k < 2; ++k) CHECK(std::abs(lin.mean(k) - g(k)) < 4.0 * lin.se(k));
    const McEstimate relu =
        monte_carlo_grad(ModelSpec::two_neuron_relu(), {Eigen::VectorXd(w), Eigen::VectorXd(w2)}, vx, circle, 200000, 4);
    const ReluEval e = eval_relu(w, w2, v, circle);
    Eigen::Vector4d q;
    q << e.grad1, e.grad2;
    for (int k = 0; k < 4; ++k) CHECK(std::abs(relu.mean(k) - q(k)) < 4.0 * relu.se(k));
  }

  TEST_CASE("stable logistic helpers") {
    CHECK(std::abs(logistic_tail(700.0) / std::exp(-700.0) - 1.0) < 1e-12);
    CHECK(logistic_tail(-800.0) == 1.0);
    CHECK(softplus(800.0) == 800.0);
    CHECK(std::abs(softplus(-40.0) - std::exp(-40.0)) < 1e-30);
    CHECK(std::abs(softplus(0.0) - std::log(2.0)) < 1e-16);
  }

  TEST_CASE("quadrature reports exhaustion") {
    QuadratureConfig q;
    q.abs_tol = 1e-300;
    q.rel_tol = 0.0;
    q.max_panels = 4;
    try {
      eval_linear(Eigen::Vector2d(0.6, -0.8), v, circle, q);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(e.residual() > 0.0);
    }
    QuadratureConfig bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("gauss legendre integrates polynomials exactly") {
    const GaussRule& r = gauss_legendre16();
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 30);
    CHECK(std::abs(s - 2.0 / 31.0) < 1e-15);
  }
}
