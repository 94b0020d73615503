#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dirflow/errors.hpp"
#include "dirflow/monte_carlo.hpp"
#include "dirflow/radial_law.hpp"

using namespace dirflow;
constexpr double kPi = std::numbers::pi;

TEST_SUITE("dist_core") {
  TEST_CASE("unit circle moments") {
    const MomentConstants m = RadialLaw::unit_circle().moments();
    CHECK(m.c0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.c1 == doctest::Approx(2.0 / kPi).epsilon(1e-15));
    CHECK(m.c2 == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("gaussian moments") {
    const MomentConstants m = RadialLaw::gaussian2d().moments();
    CHECK(std::abs(m.c0 - std::sqrt(kPi / 2.0)) < 1e-12);
    CHECK(std::abs(m.c1 - std::sqrt(2.0 / kPi)) < 1e-12);
    CHECK(std::abs(m.c2 - 1.0) < 1e-12);
  }

  TEST_CASE("c1 matches a brute-force angular average") {
    const RadialLaw law = RadialLaw::atoms({{0.5, 0.3}, {1.0, 0.5}, {3.0, 0.2}});
    // E|x_1| = E r * (1/2pi) int |cos| ; midpoint rule with the kinks of |cos| on cell edges.
    const int n = 400000;
    double avg = 0.0;
    for (int i = 0; i < n; ++i) avg += std::abs(std::cos(2.0 * kPi * (i + 0.5) / n));
    avg /= n;
    double er = 0.0, er2 = 0.0;
    for (const auto& [r, p] : std::vector<std::pair<double, double>>{{0.5, 0.3}, {1.0, 0.5}, {3.0, 0.2}}) {
      er += p * r;
      er2 += p * r * r;
    }
    const MomentConstants m = law.moments();
    CHECK(std::abs(m.c0 - er) < 1e-15);
    CHECK(std::abs(m.c1 - er * avg) < 1e-10);
    CHECK(std::abs(m.c2 - er2 / 2.0) < 1e-15);
  }

  TEST_CASE("moments ignore atom order and duplicate radii") {
    const MomentConstants a = RadialLaw::atoms({{3.0, 0.2}, {1.0, 0.3}, {0.5, 0.3}, {1.0, 0.2}}).moments();
    const MomentConstants b = RadialLaw::atoms({{0.5, 0.3}, {1.0, 0.5}, {3.0, 0.2}}).moments();
    CHECK(std::abs(a.c0 - b.c0) < 1e-15);
    CHECK(std::abs(a.c1 - b.c1) < 1e-15);
    CHECK(std::abs(a.c2 - b.c2) < 1e-15);
  }

  TEST_CASE("quantile nodes integrate smooth laws") {
    // Radius uniform on [0, 2]: E r = 1, E r^2 = 4/3.
    const MomentConstants m = RadialLaw::from_quantile([](double u) { return 2.0 * u; }, 64).moments();
    CHECK(std::abs(m.c0 - 1.0) < 1e-13);
    CHECK(std::abs(m.c2 - 2.0 / 3.0) < 1e-13);
  }

  TEST_CASE("invalid laws and shapes") {
    CHECK_THROWS_AS(RadialLaw::atoms({}), ConfigError);
    CHECK_THROWS_AS(RadialLaw::atoms({{1.0, -0.5}, {2.0, 1.5}}), ConfigError);
    CHECK_THROWS_AS(sample(RadialLaw::unit_circle(), 1, 10, 0), ConfigError);
  }

  TEST_CASE("sampling is seeded and lands on the atoms") {
    const RadialLaw law = RadialLaw::atoms({{1.0, 0.5}, {2.0, 0.5}});
    const Eigen::MatrixXd a = sample(law, 5, 200, 7), b = sample(law, 5, 200, 7), c = sample(law, 5, 200, 8);
    CHECK(a == b);
    CHECK(a != c);
    for (int j = 0; j < a.cols(); ++j) {
      const double r = a.col(j).norm();
      CHECK((std::abs(r - 1.0) < 1e-12 || std::abs(r - 2.0) < 1e-12));
    }
  }

  TEST_CASE("gaussian 2D marginal is dimension free") {
    const RadialLaw g = RadialLaw::gaussian2d();
    for (int d : {2, 5, 20}) {
      const McEstimate e = monte_carlo_mean(g, d, 1, 100000, 11 + d, [](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> o) {
        o(0) = x.head<2>().norm();
      });
      CHECK(std::abs(e.mean(0) - g.c0()) < 4.0 * e.se(0));
    }
  }

  TEST_CASE("monte carlo result does not depend on the thread count") {
    const RadialLaw law = RadialLaw::unit_circle();
    auto run = [&] {
      return monte_carlo_mean(law, 3, 2, 50000, 99, [](const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> o) {
        o(0) = x(0) * x(0);
        o(1) = std::abs(x(1));
      });
    };
    setenv("DIRFLOW_THREADS", "1", 1);
    const McEstimate one = run();
    setenv("DIRFLOW_THREADS", "4", 1);
    const McEstimate four = run();
    unsetenv("DIRFLOW_THREADS");
    CHECK(one.mean == four.mean);
    CHECK(one.se == four.se);
  }
}
