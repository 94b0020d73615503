#include "dirflow/gradient.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "dirflow/errors.hpp"

namespace dirflow {

double logistic_tail(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

namespace {

double sgn(double z) { return z >= 0.0 ? 1.0 : -1.0; }
double relu(double z) { return z > 0.0 ? z : 0.0; }

}  // namespace

LinearEval eval_linear(const Eigen::Vector2d& w, const Eigen::Vector2d& v, const RadialLaw& law,
                       const QuadratureConfig& cfg) {
  std::vector<double> kinks;
  append_zero_angles(v, kinks);
  append_zero_angles(w, kinks);
  const std::vector<double> edges = panel_edges(std::move(kinks));
  const auto& nodes = law.nodes();

  // Components: loss, radial factor S1 (times -y x_hat gives the gradient).
  auto f = [&](double phi) {
    const Eigen::Vector2d x(std::cos(phi), std::sin(phi));
    const double y = sgn(v.dot(x));
    const double a = w.dot(x);
    double lo = 0.0, s1 = 0.0;
    for (const auto& n : nodes) {
      const double z = y * n.r * a;
      lo += n.p * softplus(-z);
      s1 += n.p * n.r * logistic_tail(z);
    }
    Eigen::Vector3d out;
    out << lo, -y * s1 * x.x(), -y * s1 * x.y();
    return out;
  };
  const auto res = integrate_angular<3>(edges, f, cfg);
  LinearEval e;
  e.loss = res.value(0);
  e.grad = res.value.tail<2>();
  e.n = -w.dot(e.grad);
  e.error = res.error_estimate;
  return e;
}

ReluEval eval_relu(const Eigen::Vector2d& w1, const Eigen::Vector2d& w2, const Eigen::Vector2d& v,
                   const RadialLaw& law, const QuadratureConfig& cfg) {
  std::vector<double> kinks;
  append_zero_angles(v, kinks);
  append_zero_angles(w1, kinks);
  append_zero_angles(w2, kinks);
  const std::vector<double> edges = panel_edges(std::move(kinks));
  const auto& nodes = law.nodes();

  auto f = [&](double phi) {
    const Eigen::Vector2d x(std::cos(phi), std::sin(phi));
    const double y = sgn(v.dot(x));
    const double a1 = w1.dot(x), a2 = w2.dot(x);
    const double c = relu(a1) - relu(a2);
    double lo = 0.0, s = 0.0;
    for (const auto& n : nodes) {
      const double z = y * n.r * c;
      lo += n.p * softplus(-z);
      s += n.p * n.r * logistic_tail(z);
    }
    const double g1 = a1 >= 0.0 ? -y * s : 0.0;
    const double g2 = a2 >= 0.0 ? y * s : 0.0;
    Eigen::Matrix<double, 5, 1> out;
    out << lo, g1 * x.x(), g1 * x.y(), g2 * x.x(), g2 * x.y();
    return out;
  };
  const auto res = integrate_angular<5>(edges, f, cfg);
  ReluEval e;
  e.loss = res.value(0);
  e.grad1 = res.value.segment<2>(1);
  e.grad2 = res.value.segment<2>(3);
  e.n = -w1.dot(e.grad1) - w2.dot(e.grad2);
  e.error = res.error_estimate;
  return e;
}

namespace {

void require_weights(const PlaneState& s, std::size_t k) {
  if (s.weights2.size() < k) throw ConfigError("plane state has too few weight vectors for this model");
}

}  // namespace

double loss(const PlaneState& state, const ModelSpec& model, const RadialLaw& law, const QuadratureConfig& cfg) {
  if (model.kind == ModelKind::TwoNeuronReLU) {
    require_weights(state, 2);
    return eval_relu(state.weights2[0], state.weights2[1], state.v2, law, cfg).loss;
  }
  require_weights(state, 1);
  return eval_linear(state.weights2[0], state.v2, law, cfg).loss;
}

Eigen::Vector2d grad_linear(const PlaneState& state, const RadialLaw& law, const QuadratureConfig& cfg) {
  require_weights(state, 1);
  return eval_linear(state.weights2[0], state.v2, law, cfg).grad;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> grad_two_neuron(const PlaneState& state, const RadialLaw& law,
                                                            const QuadratureConfig& cfg) {
  require_weights(state, 2);
  const auto e = eval_relu(state.weights2[0], state.weights2[1], state.v2, law, cfg);
  return {e.grad1, e.grad2};
}

double n_of_w(const PlaneState& state, const ModelSpec& model, const RadialLaw& law, const QuadratureConfig& cfg) {
  if (model.kind == ModelKind::TwoNeuronReLU) {
    require_weights(state, 2);
    return eval_relu(state.weights2[0], state.weights2[1], state.v2, law, cfg).n;
  }
  require_weights(state, 1);
  return eval_linear(state.weights2[0], state.v2, law, cfg).n;
}

Eigen::Vector2d induced_velocity(const Eigen::Vector2d& w_e, const Eigen::Vector2d& g, int N) {
  if (N < 1) throw ConfigError("deep model: depth must be >= 1");
  if (N == 1) return -g;
  const double norm = w_e.norm();
  if (norm < 1e-12) throw SingularityError("deep induced flow: ||w_e|| < 1e-12");
  const Eigen::Vector2d u = w_e / norm;
  const double scale = std::pow(norm, 2.0 - 2.0 / N);
  return -scale * (g + (N - 1) * u * u.dot(g));
}

Eigen::Vector2d grad_deep_effective(const Eigen::Vector2d& w_e, const Eigen::Vector2d& v, int N,
                                    const RadialLaw& law, const QuadratureConfig& cfg) {
  if (N >= 2 && w_e.norm() < 1e-12) throw SingularityError("deep induced flow: ||w_e|| < 1e-12");
  return induced_velocity(w_e, eval_linear(w_e, v, law, cfg).grad, N);
}

Eigen::VectorXd grad_linear_ambient(const Eigen::VectorXd& w, const Eigen::VectorXd& v, const RadialLaw& law,
                                    const QuadratureConfig& cfg) {
  const PlaneState s = PlaneState::from_ambient(v, {w});
  return s.embed(eval_linear(s.weights2[0], s.v2, law, cfg).grad);
}

double tangential_rate(const Eigen::Vector2d& w, const Eigen::Vector2d& v, const Eigen::Vector2d& grad) {
  const Eigen::Vector2d u = w / w.norm();
  return -(v - u.dot(v) * u).dot(grad);
}

}  // namespace dirflow
