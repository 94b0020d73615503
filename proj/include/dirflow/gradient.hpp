#pragma once

#include <Eigen/Core>

#include <utility>

#include "dirflow/models.hpp"
#include "dirflow/plane.hpp"
#include "dirflow/quadrature.hpp"
#include "dirflow/radial_law.hpp"

namespace dirflow {

struct LinearEval {
  double loss = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  double n = 0.0;  // -w^T grad
  double error = 0.0;
};

struct ReluEval {
  double loss = 0.0;
  Eigen::Vector2d grad1 = Eigen::Vector2d::Zero();
  Eigen::Vector2d grad2 = Eigen::Vector2d::Zero();
  double n = 0.0;  // -w1^T grad1 - w2^T grad2
  double error = 0.0;
};

// Population loss, gradient and N(w) of the linear predictor w^T x.
LinearEval eval_linear(const Eigen::Vector2d& w, const Eigen::Vector2d& v, const RadialLaw& law,
                       const QuadratureConfig& cfg = {});

// Same for relu(w1^T x) - relu(w2^T x), with relu'(0) = 1.
ReluEval eval_relu(const Eigen::Vector2d& w1, const Eigen::Vector2d& w2, const Eigen::Vector2d& v,
                   const RadialLaw& law, const QuadratureConfig& cfg = {});

// Deep models are evaluated at the effective weight weights2[0].
double loss(const PlaneState& state, const ModelSpec& model, const RadialLaw& law,
            const QuadratureConfig& cfg = {});
Eigen::Vector2d grad_linear(const PlaneState& state, const RadialLaw& law, const QuadratureConfig& cfg = {});
std::pair<Eigen::Vector2d, Eigen::Vector2d> grad_two_neuron(const PlaneState& state, const RadialLaw& law,
                                                            const QuadratureConfig& cfg = {});
double n_of_w(const PlaneState& state, const ModelSpec& model, const RadialLaw& law,
              const QuadratureConfig& cfg = {});

// dw_e/dt of the induced flow: -||w||^{2-2/N} (g + (N-1) wbar wbar^T g), g = grad L(w_e).
Eigen::Vector2d grad_deep_effective(const Eigen::Vector2d& w_e, const Eigen::Vector2d& v, int N,
                                    const RadialLaw& law, const QuadratureConfig& cfg = {});
Eigen::Vector2d induced_velocity(const Eigen::Vector2d& w_e, const Eigen::Vector2d& g, int N);

// Linear gradient for w, v in R^d via the plane through them.
Eigen::VectorXd grad_linear_ambient(const Eigen::VectorXd& w, const Eigen::VectorXd& v, const RadialLaw& law,
                                    const QuadratureConfig& cfg = {});

// -(v - (wbar^T v) wbar)^T grad: the rate at which -grad turns w toward v.
double tangential_rate(const Eigen::Vector2d& w, const Eigen::Vector2d& v, const Eigen::Vector2d& grad);

// Numerically stable 1/(1+e^z) and ln(1+e^z).
double logistic_tail(double z);
double softplus(double z);

}  // namespace dirflow
