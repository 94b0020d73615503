#pragma once

#include <string>
#include <vector>

namespace dirflow {

enum class ScheduleKind { Constant, Geometric, Power };

// eta_n = eta0 (constant), eta0 q^n (geometric) or eta0 (n+1)^alpha (power).
struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double eta0 = 1e-3;
  double q = 1.0;
  double alpha = 0.0;
  long offset = 0;

  static Schedule constant(double eta) { return {ScheduleKind::Constant, eta, 1.0, 0.0, 0}; }
  static Schedule geometric(double eta0, double q) { return {ScheduleKind::Geometric, eta0, q, 0.0, 0}; }
  static Schedule power(double eta0, double alpha) { return {ScheduleKind::Power, eta0, 1.0, alpha, 0}; }

  double rate(long n) const;
  // Schedule whose step k is this schedule's step offset + k.
  Schedule shifted(long offset) const;
  std::string describe() const;
  void validate() const;
  // True iff the infinite sequence stays inside some [eta_-, eta_+] with eta_- > 0.
  bool bounded() const {
    return kind == ScheduleKind::Constant || (kind == ScheduleKind::Geometric && q == 1.0) ||
           (kind == ScheduleKind::Power && alpha == 0.0);
  }
};

struct RateRange {
  double eta_minus = 0.0;
  double eta_plus = 0.0;
  bool bounded = false;  // all rates in [eta_minus, eta_plus] with eta_minus > 0
};

// Smallest and largest rate over steps 0..n-1.
RateRange rate_range(const Schedule& s, long n);

// S^-_n = sum_{k<n} eta_k / sqrt(A + sum_{i<=k} eta_i^2)
double s_minus(const Schedule& s, long n, double A);
// S^+_n = sum_{k<n} eta_k / sqrt(A + sum_{i<=k} (eta_i^2 + C eta_i))
double s_plus(const Schedule& s, long n, double A, double C);
// S_n = sum_{k<n} eta_k / sqrt(base + sum_{i<=k} (2 eta_i^2 c0^2 + 0.6 eta_i))
double s_relu(const Schedule& s, long n, double base, double c0);

// Entries 0..n of the same sums (entry 0 is 0).
std::vector<double> s_minus_series(const Schedule& s, long n, double A);
std::vector<double> s_plus_series(const Schedule& s, long n, double A, double C);
std::vector<double> s_relu_series(const Schedule& s, long n, double base, double c0);

}  // namespace dirflow
