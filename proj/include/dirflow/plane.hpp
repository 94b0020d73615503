#pragma once

#include <Eigen/Core>

#include <vector>

namespace dirflow {

// Weights and target in the invariant 2D plane, plus the orthonormal basis
// (d x 2) that embeds plane coordinates back into R^d.
struct PlaneState {
  Eigen::Vector2d v2{0.0, 1.0};
  std::vector<Eigen::Vector2d> weights2;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(2, 2);

  // Builds the plane spanned by v and the weights; throws ConfigError if the
  // weights do not fit in a single plane with v.
  static PlaneState from_ambient(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& weights);
  static PlaneState planar(const Eigen::Vector2d& v, std::vector<Eigen::Vector2d> weights);

  Eigen::VectorXd embed(const Eigen::Vector2d& p) const { return basis * p; }
  Eigen::Vector2d project(const Eigen::VectorXd& x) const { return basis.transpose() * x; }
  int dimension() const { return static_cast<int>(basis.rows()); }

  void validate() const;
};

// cos of the angle between w and v; NaN for w = 0.
double cos_angle(const Eigen::Vector2d& w, const Eigen::Vector2d& v);
double angle(const Eigen::Vector2d& w, const Eigen::Vector2d& v);

// The vector of length norm obtained by rotating unit v counter-clockwise by theta.
Eigen::Vector2d from_polar(double norm, double theta, const Eigen::Vector2d& v);

// 2D cross product u x w (z-component).
inline double cross(const Eigen::Vector2d& u, const Eigen::Vector2d& w) {
  return u.x() * w.y() - u.y() * w.x();
}

}  // namespace dirflow
