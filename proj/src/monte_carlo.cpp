#include "dirflow/monte_carlo.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "dirflow/errors.hpp"
#include "dirflow/gradient.hpp"

namespace dirflow {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int worker_threads() {
  if (const char* env = std::getenv("DIRFLOW_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr int kShards = 16;

struct Welford {
  long n = 0;
  Eigen::VectorXd mean, m2;
};

}  // namespace

McEstimate monte_carlo_mean(const RadialLaw& law, int dimension, int out_size, long n, std::uint64_t seed,
                            const SampleFn& f) {
  if (n < 1) throw ConfigError("monte carlo: sample count must be >= 1");
  if (dimension < 2) throw ConfigError("monte carlo: dimension must be >= 2");
  std::vector<Welford> shards(kShards);
  auto run_shard = [&](int s) {
    const long count = n / kShards + (s < n % kShards ? 1 : 0);
    Welford& w = shards[s];
    w.mean = Eigen::VectorXd::Zero(out_size);
    w.m2 = Eigen::VectorXd::Zero(out_size);
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s) + 1)));
    Eigen::VectorXd x(dimension), val(out_size), delta(out_size);
    for (long i = 0; i < count; ++i) {
      draw_point(law, rng, x);
      f(x, val);
      ++w.n;
      delta = val - w.mean;
      w.mean += delta / static_cast<double>(w.n);
      w.m2 += delta.cwiseProduct(val - w.mean);
    }
  };

  const int threads = std::min(worker_threads(), kShards);
  if (threads <= 1) {
    for (int s = 0; s < kShards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int s = t; s < kShards; s += threads) run_shard(s);
      });
    }
    for (auto& th : pool) th.join();
  }

  Welford total{0, Eigen::VectorXd::Zero(out_size), Eigen::VectorXd::Zero(out_size)};
  for (const auto& w : shards) {
    if (w.n == 0) continue;
    const long nn = total.n + w.n;
    const Eigen::VectorXd delta = w.mean - total.mean;
    total.mean += delta * (static_cast<double>(w.n) / nn);
    total.m2 += w.m2 + delta.cwiseProduct(delta) * (static_cast<double>(total.n) * w.n / nn);
    total.n = nn;
  }
  McEstimate out;
  out.count = total.n;
  out.mean = total.mean;
  const double denom = total.n > 1 ? static_cast<double>(total.n - 1) : 1.0;
  out.se = (total.m2 / denom / static_cast<double>(total.n)).cwiseSqrt();
  return out;
}

McEstimate monte_carlo_grad(const ModelSpec& model, const std::vector<Eigen::VectorXd>& weights,
                            const Eigen::VectorXd& v, const RadialLaw& law, long n, std::uint64_t seed) {
  if (n < 1000) throw ConfigError("monte_carlo_grad: need at least 1000 samples");
  const int d = static_cast<int>(v.size());
  if (static_cast<int>(weights.size()) != model.neurons()) {
    throw ConfigError("monte_carlo_grad: wrong number of weight vectors for model");
  }
  for (const auto& w : weights) {
    if (w.size() != d) throw ConfigError("monte_carlo_grad: weight dimension differs from v");
  }
  auto sgn = [](double z) { return z >= 0.0 ? 1.0 : -1.0; };

  switch (model.kind) {
    case ModelKind::Linear: {
      const Eigen::VectorXd w = weights[0];
      return monte_carlo_mean(law, d, d, n, seed, [&](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) {
        const double y = sgn(v.dot(x));
        out = -y * logistic_tail(y * w.dot(x)) * x;
      });
    }
    case ModelKind::DeepLinear: {
      const Eigen::VectorXd w = weights[0];
      const int N = model.depth;
      const double norm = w.norm();
      if (N >= 2 && norm < 1e-12) throw SingularityError("deep induced flow: ||w_e|| < 1e-12");
      // The velocity is linear in the gradient: M g with M = -s (I + (N-1) u u^T).
      Eigen::MatrixXd M = -Eigen::MatrixXd::Identity(d, d);
      if (N >= 2) {
        const Eigen::VectorXd u = w / norm;
        M = -std::pow(norm, 2.0 - 2.0 / N) * (Eigen::MatrixXd::Identity(d, d) + (N - 1) * u * u.transpose());
      }
      return monte_carlo_mean(law, d, d, n, seed, [&](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) {
        const double y = sgn(v.dot(x));
        out = M * (-y * logistic_tail(y * w.dot(x)) * x);
      });
    }
    case ModelKind::TwoNeuronReLU: {
      const Eigen::VectorXd w1 = weights[0], w2 = weights[1];
      return monte_carlo_mean(law, d, 2 * d, n, seed,
                              [&](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) {
                                const double y = sgn(v.dot(x));
                                const double a1 = w1.dot(x), a2 = w2.dot(x);
                                const double s = logistic_tail(y * (std::max(a1, 0.0) - std::max(a2, 0.0)));
                                out.head(d) = (a1 >= 0.0 ? -y * s : 0.0) * x;
                                out.tail(d) = (a2 >= 0.0 ? y * s : 0.0) * x;
                              });
    }
  }
  throw ConfigError("monte_carlo_grad: unknown model");
}

McEstimate monte_carlo_n_linear(const Eigen::VectorXd& w, const Eigen::VectorXd& v, const RadialLaw& law, long n,
                                std::uint64_t seed) {
  const int d = static_cast<int>(v.size());
  return monte_carlo_mean(law, d, 1, n, seed, [&](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) {
    const double y = v.dot(x) >= 0.0 ? 1.0 : -1.0;
    const double z = y * w.dot(x);
    out(0) = z * logistic_tail(z);
  });
}

}  // namespace dirflow
