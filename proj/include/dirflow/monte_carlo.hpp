#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "dirflow/models.hpp"
#include "dirflow/radial_law.hpp"

namespace dirflow {

struct McEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd se;  // per-coordinate standard error of the mean
  long count = 0;
};

// Per-sample contribution f(x, out); out has the requested size.
using SampleFn = std::function<void(const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out)>;

// Sample mean over n draws in R^d. Draws are split into a fixed number of
// shards with derived seeds and merged in shard order, so the result depends
// only on (n, seed) and not on the thread count (DIRFLOW_THREADS).
McEstimate monte_carlo_mean(const RadialLaw& law, int dimension, int out_size, long n, std::uint64_t seed,
                            const SampleFn& f);

// Population gradient estimate in R^d. Linear: weights = {w}. DeepLinear:
// weights = {w_e}, returns the induced velocity. TwoNeuronReLU: weights =
// {w1, w2}, returns (grad1, grad2) stacked.
McEstimate monte_carlo_grad(const ModelSpec& model, const std::vector<Eigen::VectorXd>& weights,
                            const Eigen::VectorXd& v, const RadialLaw& law, long n, std::uint64_t seed);

// Estimate of N(w) = -w^T grad L(w) for the linear model.
McEstimate monte_carlo_n_linear(const Eigen::VectorXd& w, const Eigen::VectorXd& v, const RadialLaw& law, long n,
                                std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);
int worker_threads();

}  // namespace dirflow
