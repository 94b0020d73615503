#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "dirflow/errors.hpp"

namespace dirflow {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-13;  // also accept panels accurate relative to their own size
  int max_panels = 20000;

  void validate() const {
    if (!(abs_tol > 0.0)) throw ConfigError("QuadratureConfig.abs_tol must be > 0");
    if (!(rel_tol >= 0.0)) throw ConfigError("QuadratureConfig.rel_tol must be >= 0");
    if (max_panels < 1) throw ConfigError("QuadratureConfig.max_panels must be >= 1");
  }
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

// The 16-point rule used for every angular panel.
const GaussRule& gauss_legendre16();

// Zeros of u^T (cos phi, sin phi) in [0, 2pi); empty if u == 0.
void append_zero_angles(const Eigen::Vector2d& u, std::vector<double>& out);

// Sorted, deduplicated panel edges covering [0, 2pi] with the given kinks.
std::vector<double> panel_edges(std::vector<double> kinks);

template <int K>
struct AngularResult {
  Eigen::Matrix<double, K, 1> value;
  double error_estimate = 0.0;
  int panels = 0;
};

// Computes (1/2pi) * integral over [0, 2pi) of f(phi), where f is smooth on
// each interval between consecutive edges. Each interval is refined by
// bisection until the 16-point rule on the whole and the two halves agree to
// a share of abs_tol proportional to its length.
template <int K, class F>
AngularResult<K> integrate_angular(std::span<const double> edges, F&& f,
                                   const QuadratureConfig& cfg) {
  using Vec = Eigen::Matrix<double, K, 1>;
  const GaussRule& rule = gauss_legendre16();
  constexpr double two_pi = 2.0 * std::numbers::pi;

  auto panel = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Vec acc = Vec::Zero();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return Vec(half * acc);
  };

  struct Pending {
    double a, b;
    Vec whole;
  };

  AngularResult<K> out;
  out.value.setZero();
  std::vector<Pending> stack;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) stack.push_back({edges[i], edges[i + 1], panel(edges[i], edges[i + 1])});
  }
  // Panels narrower than this cannot be split further in double precision.
  constexpr double min_width = 1e-13;
  while (!stack.empty()) {
    Pending p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    Vec left = panel(p.a, m);
    Vec right = panel(m, p.b);
    Vec both = left + right;
    const double err = (both - p.whole).cwiseAbs().maxCoeff();
    // Raw (un-normalized) budget: abs_tol overall, or rel_tol of the panel itself.
    const double share = std::max(cfg.abs_tol * (p.b - p.a), cfg.rel_tol * both.cwiseAbs().maxCoeff());
    if (err <= share || (p.b - p.a) < min_width) {
      out.value += both;
      out.error_estimate += err;
      ++out.panels;
      continue;
    }
    if (out.panels + static_cast<int>(stack.size()) + 2 > cfg.max_panels) {
      throw NumericalError("angular quadrature exceeded max_panels",
                           (out.error_estimate + err) / two_pi);
    }
    stack.push_back({p.a, m, left});
    stack.push_back({m, p.b, right});
  }
  out.value /= two_pi;
  out.error_estimate /= two_pi;
  return out;
}

}  // namespace dirflow
