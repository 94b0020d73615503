#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace dirflow {

// One quadrature node of the radial law: radius and probability weight.
struct RadialNode {
  double r = 0.0;
  double p = 0.0;
};

struct MomentConstants {
  double c0 = 0.0;  // E ||x|| under the 2D marginal
  double c1 = 0.0;  // E |x_1|
  double c2 = 0.0;  // E x_1^2
};

// Law of ||x|| for a spherically symmetric input. Continuous laws are carried
// by quadrature nodes, so every expectation below is a finite weighted sum.
class RadialLaw {
 public:
  RadialLaw() = default;

  static RadialLaw atoms(std::vector<std::pair<double, double>> rp, std::string label = "atoms");
  static RadialLaw unit_circle();
  // Radial law of a 2D standard Gaussian (Rayleigh), 64-node Gauss-Legendre on [0, 12].
  static RadialLaw gaussian2d();
  // n-point Gauss-Legendre over u in (0, 1) of the quantile function.
  static RadialLaw from_quantile(const std::function<double(double)>& quantile, int n,
                                 std::string label = "quantile");

  const std::vector<RadialNode>& nodes() const { return nodes_; }
  const std::string& label() const { return label_; }
  bool is_gaussian2d() const { return gaussian_; }

  MomentConstants moments() const;
  double c0() const { return moments().c0; }

  double draw_radius(std::mt19937_64& rng) const;

 private:
  void validate() const;

  std::vector<RadialNode> nodes_;
  std::vector<double> cdf_;
  std::function<double(double)> quantile_;  // exact sampler for continuous laws
  std::string label_;
  bool gaussian_ = false;
};

MomentConstants moment_constants(const RadialLaw& law);

// One draw in R^d from rng; the building block of sample().
void draw_point(const RadialLaw& law, std::mt19937_64& rng, Eigen::Ref<Eigen::VectorXd> out);

// One draw of the 2D marginal: radius times a uniform angle.
Eigen::Vector2d draw_plane_point(const RadialLaw& law, std::mt19937_64& rng);

// count samples in R^d as columns. Gaussian laws draw N(0, I_d) directly;
// other laws draw radius times a uniform direction on S^{d-1}.
Eigen::MatrixXd sample(const RadialLaw& law, int dimension, int count, std::uint64_t seed);

}  // namespace dirflow
