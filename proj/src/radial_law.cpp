#include "dirflow/radial_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dirflow/errors.hpp"
#include "dirflow/quadrature.hpp"

namespace dirflow {

RadialLaw RadialLaw::atoms(std::vector<std::pair<double, double>> rp, std::string label) {
  if (rp.empty()) throw ConfigError("radial law has no atoms");
  RadialLaw law;
  law.label_ = std::move(label);
  for (const auto& [r, p] : rp) law.nodes_.push_back({r, p});
  law.validate();
  return law;
}

RadialLaw RadialLaw::unit_circle() { return atoms({{1.0, 1.0}}, "unit_circle"); }

RadialLaw RadialLaw::gaussian2d() {
  const GaussRule rule = gauss_legendre(64);
  constexpr double rmax = 12.0;
  RadialLaw law;
  law.label_ = "gaussian2d";
  law.gaussian_ = true;
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = 0.5 * rmax * (rule.nodes[i] + 1.0);
    const double p = 0.5 * rmax * rule.weights[i] * r * std::exp(-0.5 * r * r);
    law.nodes_.push_back({r, p});
    total += p;
  }
  for (auto& n : law.nodes_) n.p /= total;
  law.quantile_ = [](double u) { return std::sqrt(-2.0 * std::log1p(-u)); };
  law.validate();
  return law;
}

RadialLaw RadialLaw::from_quantile(const std::function<double(double)>& quantile, int n,
                                   std::string label) {
  const GaussRule rule = gauss_legendre(n);
  RadialLaw law;
  law.label_ = std::move(label);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    law.nodes_.push_back({quantile(0.5 * (rule.nodes[i] + 1.0)), 0.5 * rule.weights[i]});
  }
  law.quantile_ = quantile;
  law.validate();
  return law;
}

void RadialLaw::validate() const {
  if (nodes_.empty()) throw ConfigError("radial law has no atoms");
  double total = 0.0;
  bool positive = false;
  for (const auto& n : nodes_) {
    if (!std::isfinite(n.r) || n.r < 0.0) throw ConfigError("radial law: radius must be >= 0");
    if (!(n.p >= 0.0 && n.p <= 1.0)) throw ConfigError("radial law: probability outside [0, 1]");
    total += n.p;
    if (n.r > 0.0 && n.p > 0.0) positive = true;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("radial law: probabilities must sum to 1");
  if (!positive) throw ConfigError("radial law: needs positive mass at a positive radius");
}

MomentConstants RadialLaw::moments() const {
  // Sorting makes the sums independent of atom order up to rounding.
  std::vector<RadialNode> sorted = nodes_;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.r < b.r || (a.r == b.r && a.p < b.p);
  });
  MomentConstants m;
  double second = 0.0;
  for (const auto& n : sorted) {
    m.c0 += n.p * n.r;
    second += n.p * n.r * n.r;
  }
  m.c1 = m.c0 * 2.0 / std::numbers::pi;
  m.c2 = 0.5 * second;
  return m;
}

double RadialLaw::draw_radius(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (quantile_) return quantile_(u);
  double acc = 0.0;
  for (const auto& n : nodes_) {
    acc += n.p;
    if (u < acc) return n.r;
  }
  return nodes_.back().r;
}

MomentConstants moment_constants(const RadialLaw& law) { return law.moments(); }

void draw_point(const RadialLaw& law, std::mt19937_64& rng, Eigen::Ref<Eigen::VectorXd> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = normal(rng);
  if (!law.is_gaussian2d()) {
    const double norm = out.norm();
    out *= law.draw_radius(rng) / norm;
  }
}

Eigen::Vector2d draw_plane_point(const RadialLaw& law, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  const double phi = unif(rng);
  const double r = law.draw_radius(rng);
  return {r * std::cos(phi), r * std::sin(phi)};
}

Eigen::MatrixXd sample(const RadialLaw& law, int dimension, int count, std::uint64_t seed) {
  if (dimension < 2) throw ConfigError("sample: dimension must be >= 2");
  if (count < 1) throw ConfigError("sample: count must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd out(dimension, count);
  for (int j = 0; j < count; ++j) draw_point(law, rng, out.col(j));
  return out;
}

}  // namespace dirflow
