#include "dirflow/schedule.hpp"

#include <cmath>
#include <sstream>

#include "dirflow/errors.hpp"

namespace dirflow {

double Schedule::rate(long n) const {
  const double k = static_cast<double>(n + offset);
  switch (kind) {
    case ScheduleKind::Constant: return eta0;
    case ScheduleKind::Geometric: return eta0 * std::pow(q, k);
    case ScheduleKind::Power: return eta0 * std::pow(k + 1.0, alpha);
  }
  return eta0;
}

Schedule Schedule::shifted(long by) const {
  Schedule s = *this;
  s.offset += by;
  return s;
}

std::string Schedule::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ScheduleKind::Constant: os << "constant(" << eta0 << ")"; break;
    case ScheduleKind::Geometric: os << "geometric(" << eta0 << ", q=" << q << ")"; break;
    case ScheduleKind::Power: os << "power(" << eta0 << ", alpha=" << alpha << ")"; break;
  }
  return os.str();
}

void Schedule::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw ConfigError("schedule: eta0 must be > 0");
  if (kind == ScheduleKind::Geometric && !(q > 0.0)) throw ConfigError("schedule: q must be > 0");
  if (!std::isfinite(alpha)) throw ConfigError("schedule: alpha must be finite");
  if (offset < 0) throw ConfigError("schedule: offset must be >= 0");
}

RateRange rate_range(const Schedule& s, long n) {
  RateRange r;
  if (n < 1) return r;
  // Each family is monotone in n, so the extremes sit at the ends.
  const double a = s.rate(0), b = s.rate(n - 1);
  r.eta_minus = std::min(a, b);
  r.eta_plus = std::max(a, b);
  r.bounded = r.eta_minus > 0.0 && std::isfinite(r.eta_plus);
  return r;
}

namespace {

template <class Term>
std::vector<double> series(const Schedule& s, long n, double base, Term term) {
  if (n < 0) throw ConfigError("partial sums: n must be >= 0");
  std::vector<double> out(n + 1, 0.0);
  double inner = base;
  double acc = 0.0;
  for (long k = 0; k < n; ++k) {
    const double eta = s.rate(k);
    inner += term(eta);
    acc += eta / std::sqrt(inner);
    out[k + 1] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> s_minus_series(const Schedule& s, long n, double A) {
  return series(s, n, A, [](double eta) { return eta * eta; });
}

std::vector<double> s_plus_series(const Schedule& s, long n, double A, double C) {
  return series(s, n, A, [C](double eta) { return eta * eta + C * eta; });
}

std::vector<double> s_relu_series(const Schedule& s, long n, double base, double c0) {
  return series(s, n, base, [c0](double eta) { return 2.0 * eta * eta * c0 * c0 + 0.6 * eta; });
}

double s_minus(const Schedule& s, long n, double A) { return s_minus_series(s, n, A).back(); }
double s_plus(const Schedule& s, long n, double A, double C) { return s_plus_series(s, n, A, C).back(); }
double s_relu(const Schedule& s, long n, double base, double c0) { return s_relu_series(s, n, base, c0).back(); }

}  // namespace dirflow
