#include "dirflow/plane.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "dirflow/errors.hpp"

namespace dirflow {

PlaneState PlaneState::from_ambient(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& weights) {
  const Eigen::Index d = v.size();
  if (d < 2) throw ConfigError("plane: dimension must be >= 2");
  if (v.norm() == 0.0) throw ConfigError("plane: target v must be nonzero");
  Eigen::VectorXd e1 = v / v.norm();
  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(d);
  for (const auto& w : weights) {
    if (w.size() != d) throw ConfigError("plane: weight dimension differs from v");
    Eigen::VectorXd r = w - e1.dot(w) * e1;
    if (r.norm() > 1e-12 * std::max(1.0, w.norm())) {
      e2 = r / r.norm();
      break;
    }
  }
  if (e2.norm() == 0.0) {
    Eigen::Index k = 0;
    e1.cwiseAbs().minCoeff(&k);
    Eigen::VectorXd r = Eigen::VectorXd::Unit(d, k) - e1(k) * e1;
    e2 = r / r.norm();
  }
  PlaneState s;
  s.basis.resize(d, 2);
  s.basis.col(0) = e1;
  s.basis.col(1) = e2;
  s.v2 = Eigen::Vector2d(1.0, 0.0);
  for (const auto& w : weights) {
    Eigen::Vector2d p = s.project(w);
    if ((s.embed(p) - w).norm() > 1e-12 * std::max(1.0, w.norm())) {
      throw ConfigError("plane: weights and v do not share a common 2D plane");
    }
    s.weights2.push_back(p);
  }
  return s;
}

PlaneState PlaneState::planar(const Eigen::Vector2d& v, std::vector<Eigen::Vector2d> weights) {
  PlaneState s;
  s.v2 = v;
  s.weights2 = std::move(weights);
  s.validate();
  return s;
}

void PlaneState::validate() const {
  if (std::abs(v2.norm() - 1.0) > 1e-12) throw ConfigError("plane: v must be a unit vector");
  if (basis.cols() != 2) throw ConfigError("plane: basis must have two columns");
  Eigen::Matrix2d gram = basis.transpose() * basis;
  if ((gram - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("plane: basis is not orthonormal");
  }
  for (const auto& w : weights2) {
    if (!w.allFinite()) throw ConfigError("plane: weight is not finite");
  }
}

double cos_angle(const Eigen::Vector2d& w, const Eigen::Vector2d& v) {
  const double n = w.norm() * v.norm();
  if (n == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(w.dot(v) / n, -1.0, 1.0);
}

double angle(const Eigen::Vector2d& w, const Eigen::Vector2d& v) {
  // atan2 form stays accurate near 0 and pi where acos loses digits.
  return std::atan2(std::abs(cross(v, w)), v.dot(w));
}

Eigen::Vector2d from_polar(double norm, double theta, const Eigen::Vector2d& v) {
  const double c = std::cos(theta), s = std::sin(theta);
  return norm * Eigen::Vector2d(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

}  // namespace dirflow
