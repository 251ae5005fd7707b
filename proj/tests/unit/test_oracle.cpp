#include <cmath>

#include "doctest.h"

#include "clusterdev/errors.hpp"
#include "clusterdev/oracle.hpp"

using namespace clusterdev;

TEST_CASE("Tonks closed form") {
  CHECK(tonks_log_z(0, 10.0, 1.0).value == 0.0);
  CHECK(tonks_log_z(1, 10.0, 1.0).value == doctest::Approx(std::log(10.0)));
  CHECK(tonks_log_z(2, 10.0, 1.0).value == doctest::Approx(std::log(40.5)));
  CHECK(tonks_log_z(3, 10.0, 1.0).value == doctest::Approx(std::log(512.0 / 6.0)));
  CHECK(std::isinf(tonks_log_z(12, 10.0, 1.0).value));
}

TEST_CASE("Tonks quadrature cross-check") {
  const auto rod = PairPotential::hard_rod(1.0);
  for (long N = 2; N <= 4; ++N) {
    const double q = quadrature_log_z(rod, 1.0, SimulationRegion::box(1, 20.0), N).value;
    CHECK(std::abs(q - tonks_log_z(N, 20.0, 1.0).value) < 1e-8);
  }
  CHECK(std::abs(quadrature_log_z(rod, 1.0, SimulationRegion::box(1, 10.0), 2).value - std::log(40.5)) < 1e-8);
  CHECK_THROWS_AS(quadrature_log_z(rod, 1.0, SimulationRegion::box(1, 20.0), 9), CapacityError);
}

TEST_CASE("free gas quadrature") {
  CHECK(quadrature_log_z(PairPotential::zero(), 1.0, SimulationRegion::box(1, 30.0), 4).value ==
        doctest::Approx(4 * std::log(30.0) - std::log(24.0)));
}

TEST_CASE("square well pair closed form") {
  // 2 Z(2) = L^2 - (2aL - a^2) + (e^{beta eps} - 1)[(2RL - R^2) - (2aL - a^2)]
  const double L = 12.0, a = 1.0, R = 1.7, eps = 0.6, beta = 1.3;
  const auto sw = PairPotential::square_well(a, R, eps);
  const double core = 2 * a * L - a * a, outer = 2 * R * L - R * R;
  const double z2 = 0.5 * (L * L - core + std::expm1(beta * eps) * (outer - core));
  CHECK(std::abs(quadrature_log_z(sw, beta, SimulationRegion::box(1, L), 2).value - std::log(z2)) < 1e-10);
}

TEST_CASE("equation of state") {
  CHECK(tonks_pressure(0.5, 1.0) == doctest::Approx(1.0));
  CHECK(tonks_beta_mu(0.5, 1.0) == doctest::Approx(std::log(0.5) - std::log(0.5) + 1.0));
  // beta p = -d ln Z / dL at large N, beta mu from finite differences in N
  const long N = 20000;
  const double L = N / 0.3, h = 1.0;
  const double dp = (tonks_log_z(N, L + h, 1.0).value - tonks_log_z(N, L - h, 1.0).value) / (2 * h);
  CHECK(dp == doctest::Approx(tonks_pressure(0.3, 1.0)).epsilon(1e-3));
  CHECK_THROWS_AS(tonks_pressure(1.0, 1.0), DomainError);
}

TEST_CASE("exact probabilities") {
  const auto e = ideal_ensemble(100.0);
  const double mu0 = std::log(0.05);
  CHECK(exact_prob(e, mu0, 5).value() == doctest::Approx(0.1754674).epsilon(1e-6));
  CHECK(std::exp(poisson_log_pmf(5, 5.0)) == doctest::Approx(0.1754674).epsilon(1e-6));
  const auto far = exact_prob(e, mu0, 500);
  CHECK(far.lo == 0.0);
  CHECK(far.hi > 0.0);
  CHECK(far.hi < 1e-10);
  const auto pv = exact_probabilities(tonks_ensemble(50.0, 1.0), std::log(0.04));
  double s = 0.0;
  for (double p : pv.p) s += p;
  CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("characteristic function inversion") {
  std::vector<double> point(8, 0.0);
  point[3] = 1.0;
  for (long N = 0; N < 8; ++N) CHECK(std::abs(char_fn_invert(point, N) - (N == 3 ? 1.0 : 0.0)) < 1e-14);
  const auto pv = exact_probabilities(ideal_ensemble(100.0), std::log(0.05));
  for (long N = 0; N <= pv.n_max; ++N) CHECK(std::abs(char_fn_invert(pv.p, N) - pv.p[N]) < 1e-10);
}
