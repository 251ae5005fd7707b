#include <cmath>

#include "doctest.h"

#include "clusterdev/errors.hpp"
#include "clusterdev/oracle.hpp"
#include "clusterdev/thermo.hpp"

using namespace clusterdev;

namespace {
FreeEnergyModel zero_model(double L) {
  const auto reg = SimulationRegion::box(1, L);
  return {1.0, reg, compute_table(PairPotential::zero(), 1.0, reg, 2, TableMode::polymer_exact)};
}
}  // namespace

TEST_CASE("canonical polynomial") {
  CHECK(p_poly(3, 10.0, 2) == doctest::Approx(0.02));
  CHECK(p_poly(3, 10.0, 3) == 0.0);
  CHECK(p_poly(1, 7.0, 1) == 0.0);
}

TEST_CASE("density polynomial") {
  CHECK(script_p_poly(0.3, 10.0, 1) == doctest::Approx(0.06));
  CHECK(script_p_poly(0.1, 10.0, 2) == 0.0);
  CHECK(script_p_poly(0.2, INFINITY, 3) == doctest::Approx(std::pow(0.2, 4)));
  // consistency with the canonical form: P_{n+1}(N/V) = (N/V) P_N(n)
  CHECK(script_p_poly(0.5, 10.0, 3) == doctest::Approx(0.5 * p_poly(5, 10.0, 3)).epsilon(1e-14));
  // derivatives against central differences
  const double h = 1e-6;
  const double fd = (script_p_poly(0.47 + h, 10.0, 3) - script_p_poly(0.47 - h, 10.0, 3)) / (2 * h);
  CHECK(script_p_poly_derivative(0.47, 10.0, 3, 1) == doctest::Approx(fd).epsilon(1e-8));
  CHECK(script_p_poly_derivative(0.47, 10.0, 3, 4) == doctest::Approx(24.0));
  CHECK(script_p_poly_derivative(0.47, 10.0, 3, 5) == 0.0);
}

TEST_CASE("Stirling remainder") {
  for (double x : {1.0, 2.0, 9.0, 10.0, 11.0, 100.0, 1e4, 1e7}) {
    const double r = stirling_remainder(x);
    CHECK(r > 0.0);
    CHECK(r < 1.0 / (12.0 * x));
  }
  CHECK(stirling_remainder(10.0) == doctest::Approx(std::lgamma(11.0) - (10 * std::log(10.0) - 10 + 0.5 * std::log(20 * M_PI))).epsilon(1e-9));
  CHECK(ln_factorial(5.0) == doctest::Approx(std::log(120.0)));
  CHECK(ln_factorial(50.0, StirlingPolicy::gamma_asymptotic) == doctest::Approx(std::lgamma(51.0)).epsilon(1e-14));
}

TEST_CASE("Stirling density term") {
  // S = (ln N! + N - N ln N)/V
  CHECK(stirling_s(0.05, 100.0) == doctest::Approx((std::log(120.0) + 5 - 5 * std::log(5.0)) / 100.0));
  const double h = 1e-5;
  const double fd = (stirling_s(0.05 + h, 100.0) - stirling_s(0.05 - h, 100.0)) / (2 * h);
  CHECK(stirling_s_prime(0.05, 100.0) == doctest::Approx(fd).epsilon(1e-7));
  CHECK_THROWS_AS(stirling_s(0.001, 100.0), DomainError);
}

TEST_CASE("free gas log Z") {
  const auto m = zero_model(100.0);
  CHECK(log_z_canonical(m, 5).value == doctest::Approx(5 * std::log(100.0) - std::log(120.0)));
  CHECK(log_z_canonical(m, 0).value == 0.0);
  CHECK(log_z_canonical(m, 1).value == doctest::Approx(std::log(100.0)));
  CHECK(f_coefficient(m, 5, 1) == 0.0);
}

TEST_CASE("Tonks log Z from the series") {
  const auto reg = SimulationRegion::box(1, 50.0);
  const FreeEnergyModel m(1.0, reg, compute_table(PairPotential::hard_rod(1.0), 1.0, reg, 3, TableMode::polymer_exact));
  const auto v = log_z_canonical(m, 3);
  CHECK(std::abs(v.value - std::log(48.0 * 48.0 * 48.0 / 6.0)) <= v.tail + 1e-9);
  const auto reg100 = SimulationRegion::box(1, 100.0);
  const FreeEnergyModel m100(1.0, reg100,
                             compute_table(PairPotential::hard_rod(1.0), 1.0, reg100, 2, TableMode::polymer_exact));
  CHECK(f_coefficient(m100, 3, 1) == doctest::Approx(0.02 * m100.table().value(1) / 2.0));
  CHECK(f_coefficient(m100, 2, 2) == 0.0);
  CHECK_THROWS_AS(f_coefficient(m100, 5, 3), RangeError);
}

TEST_CASE("free energy density") {
  const auto m = zero_model(100.0);
  CHECK(cal_f_derivative(m, 0.05, 1).value == doctest::Approx(std::log(0.05)));
  CHECK(cal_f_derivative(m, 0.05, 2).value == doctest::Approx(20.0));
  CHECK_THROWS_AS(cal_f(m, 1.5), DomainError);
  CHECK_THROWS_AS(cal_f(m, 0.0), DomainError);
  // beta (f - F) = S at lattice densities
  for (long N = 1; N <= 8; ++N) {
    const double rho = N / 100.0;
    CHECK(free_energy_f(m, N).value - cal_f(m, rho).value == doctest::Approx(stirling_s(rho, 100.0)).epsilon(1e-13));
  }
}

TEST_CASE("grand-canonical pressure of the ideal gas") {
  const Ensemble e = make_ensemble(zero_model(100.0));
  const double mu0 = std::log(0.05);
  CHECK(std::abs(pressure_grand(e, mu0) - 0.05) < 1e-12);
  const auto gs = grand_sum(e, mu0);
  CHECK(gs.truncation < 1e-12);
  CHECK_THROWS_AS(n_max_particles(e, mu0, 5), CapacityError);
}
