#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dirflow/quadrature.hpp"
#include "dirflow/radial_law.hpp"

namespace dirflow {

enum class ModelKind { Linear, DeepLinear, TwoNeuronReLU };

struct ModelSpec {
  ModelKind kind = ModelKind::Linear;
  int depth = 1;            // DeepLinear only
  std::vector<int> widths;  // DeepLinear only: n_0 = d, ..., n_N = 1; empty = defaults

  static ModelSpec linear() { return {}; }
  static ModelSpec deep_linear(int N, std::vector<int> widths = {}) {
    return {ModelKind::DeepLinear, N, std::move(widths)};
  }
  static ModelSpec two_neuron_relu() { return {ModelKind::TwoNeuronReLU, 1, {}}; }

  int neurons() const { return kind == ModelKind::TwoNeuronReLU ? 2 : 1; }
  std::string name() const;
  void validate() const;
};

// W_1 ... W_N, W_j of shape n_j x n_{j-1}.
struct LayerStack {
  std::vector<Eigen::MatrixXd> W;

  int depth() const { return static_cast<int>(W.size()); }
  // max_j || W_{j+1}^T W_{j+1} - W_j W_j^T ||_max
  double balancedness_residual() const;
  void validate() const;
};

std::vector<int> default_widths(int d, int N);

// Rank-one balanced chain W_j = s u_{j+1} u_j^T with s = ||w_e0||^{1/N}.
// Hidden directions are e_1 unless a seed asks for random unit vectors.
LayerStack balanced_factorization(const Eigen::VectorXd& w_e0, int N, std::vector<int> widths = {},
                                  std::optional<std::uint64_t> seed = std::nullopt);

// (W_N ... W_1)^T
Eigen::VectorXd effective_weight(const LayerStack& stack);

// Gradients of the deep population loss with respect to each W_j.
std::vector<Eigen::MatrixXd> layerwise_gradients(const LayerStack& stack, const Eigen::VectorXd& v,
                                                 const RadialLaw& law, const QuadratureConfig& cfg);

}  // namespace dirflow
