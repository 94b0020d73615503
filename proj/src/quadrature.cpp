#include "dirflow/quadrature.hpp"

#include <numbers>

namespace dirflow {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const GaussRule& gauss_legendre16() {
  static const GaussRule rule = gauss_legendre(16);
  return rule;
}

namespace {
double wrap(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}
}  // namespace

void append_zero_angles(const Eigen::Vector2d& u, std::vector<double>& out) {
  if (u.norm() == 0.0) return;
  const double base = std::atan2(u.y(), u.x());
  out.push_back(wrap(base + 0.5 * std::numbers::pi));
  out.push_back(wrap(base - 0.5 * std::numbers::pi));
}

std::vector<double> panel_edges(std::vector<double> kinks) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  kinks.push_back(0.0);
  kinks.push_back(two_pi);
  std::sort(kinks.begin(), kinks.end());
  std::vector<double> edges;
  for (double k : kinks) {
    if (edges.empty() || k - edges.back() > 1e-15) edges.push_back(k);
  }
  edges.back() = two_pi;
  return edges;
}

}  // namespace dirflow
