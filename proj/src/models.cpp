#include "dirflow/models.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "dirflow/errors.hpp"
#include "dirflow/gradient.hpp"

namespace dirflow {

std::string ModelSpec::name() const {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::DeepLinear: return "deep_linear";
    case ModelKind::TwoNeuronReLU: return "two_neuron_relu";
  }
  return "unknown";
}

void ModelSpec::validate() const {
  if (depth < 1) throw ConfigError("model: depth N must be >= 1");
  if (kind != ModelKind::DeepLinear) return;
  if (!widths.empty()) {
    if (static_cast<int>(widths.size()) != depth + 1) throw ConfigError("model: widths must list N+1 sizes");
    if (widths.back() != 1) throw ConfigError("model: last width must be 1");
    for (int w : widths) {
      if (w < 1) throw ConfigError("model: widths must be >= 1");
    }
  }
}

double LayerStack::balancedness_residual() const {
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < W.size(); ++j) {
    const Eigen::MatrixXd diff = W[j + 1].transpose() * W[j + 1] - W[j] * W[j].transpose();
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return worst;
}

void LayerStack::validate() const {
  if (W.empty()) throw ConfigError("layer stack is empty");
  for (std::size_t j = 0; j + 1 < W.size(); ++j) {
    if (W[j + 1].cols() != W[j].rows()) throw ConfigError("layer stack: inner dimensions do not chain");
  }
  if (W.back().rows() != 1) throw ConfigError("layer stack: last layer must have one row");
}

std::vector<int> default_widths(int d, int N) {
  std::vector<int> w(N + 1, std::max(2, d));
  w.front() = d;
  w.back() = 1;
  return w;
}

LayerStack balanced_factorization(const Eigen::VectorXd& w_e0, int N, std::vector<int> widths,
                                  std::optional<std::uint64_t> seed) {
  if (N < 1) throw ConfigError("balanced_factorization: N must be >= 1");
  const double norm = w_e0.norm();
  if (norm == 0.0) throw ConfigError("balanced_factorization: w_e0 must be nonzero");
  const int d = static_cast<int>(w_e0.size());
  if (widths.empty()) widths = default_widths(d, N);
  if (static_cast<int>(widths.size()) != N + 1 || widths.front() != d || widths.back() != 1) {
    throw ConfigError("balanced_factorization: widths must be [d, ..., 1] with N+1 entries");
  }

  std::vector<Eigen::VectorXd> u(N + 1);
  u[0] = w_e0 / norm;
  u[N] = Eigen::VectorXd::Ones(1);
  std::mt19937_64 rng(seed.value_or(0));
  std::normal_distribution<double> normal;
  for (int j = 1; j < N; ++j) {
    if (widths[j] < 1) throw ConfigError("balanced_factorization: widths must be >= 1");
    Eigen::VectorXd e = Eigen::VectorXd::Unit(widths[j], 0);
    if (seed) {
      for (int i = 0; i < widths[j]; ++i) e(i) = normal(rng);
      e /= e.norm();
    }
    u[j] = e;
  }
  const double s = std::pow(norm, 1.0 / N);
  LayerStack stack;
  for (int j = 0; j < N; ++j) stack.W.push_back(s * u[j + 1] * u[j].transpose());
  return stack;
}

Eigen::VectorXd effective_weight(const LayerStack& stack) {
  stack.validate();
  Eigen::MatrixXd p = stack.W[0];
  for (std::size_t j = 1; j < stack.W.size(); ++j) p = stack.W[j] * p;
  return p.transpose();
}

std::vector<Eigen::MatrixXd> layerwise_gradients(const LayerStack& stack, const Eigen::VectorXd& v,
                                                 const RadialLaw& law, const QuadratureConfig& cfg) {
  stack.validate();
  const int N = stack.depth();
  if (stack.W[0].cols() != v.size()) throw ConfigError("layerwise_gradients: input width differs from dim(v)");
  const Eigen::VectorXd g = grad_linear_ambient(effective_weight(stack), v, law, cfg);

  // below[j] = W_{j-1} ... W_1 (n_{j-1} x d); above[j] = W_N ... W_{j+1} (1 x n_j).
  std::vector<Eigen::MatrixXd> below(N), above(N);
  below[0] = Eigen::MatrixXd::Identity(v.size(), v.size());
  for (int j = 1; j < N; ++j) below[j] = stack.W[j - 1] * below[j - 1];
  above[N - 1] = Eigen::MatrixXd::Identity(1, 1);
  for (int j = N - 2; j >= 0; --j) above[j] = above[j + 1] * stack.W[j + 1];

  std::vector<Eigen::MatrixXd> grads(N);
  for (int j = 0; j < N; ++j) grads[j] = above[j].transpose() * g.transpose() * below[j].transpose();
  return grads;
}

}  // namespace dirflow
