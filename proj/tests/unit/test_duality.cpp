#include <cmath>

#include "doctest.h"

#include "clusterdev/duality.hpp"
#include "clusterdev/errors.hpp"
#include "clusterdev/oracle.hpp"

using namespace clusterdev;

TEST_CASE("ideal gas mean and variance") {
  const auto e = ideal_ensemble(100.0);
  const double mu0 = std::log(0.05);
  const auto md = mean_density(e, mu0);
  CHECK(md.rho_bar == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(md.N_bar == 5);
  CHECK(md.derivative_residual < 1e-6);
  CHECK(mean_density(e, -20.0).rho_bar < 1e-8);
  CHECK(variance_sigma2(e, mu0) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(variance_check(e, mu0).rel_residual < 1e-4);
}

TEST_CASE("Tonks mean density is monotone") {
  const auto e = tonks_ensemble(100.0, 1.0);
  double prev = 0.0;
  for (double mu : {-3.7, -3.6, -3.5, -3.4}) {
    const double r = mean_density(e, mu).rho_bar;
    CHECK(r > 0.02);
    CHECK(r < 0.04);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("canonical maximiser") {
  const auto e = ideal_ensemble(100.0);
  // lambda = 5 ties N = 4 and N = 5; the larger is kept.
  const auto ns = find_n_star(e, std::log(0.05));
  CHECK(ns.N == 5);
  CHECK_FALSE(ns.boundary);
  CHECK(find_n_star(e, -20.0).N == 0);
  CHECK(find_n_star(ideal_ensemble(50.0), std::log(0.05)).N == 2);
}

TEST_CASE("tilted chemical potential") {
  const auto e = ideal_ensemble(100.0);
  const double mu0 = std::log(0.05);
  CHECK(std::abs(find_mu_tilde_count(e, 5, mu0) - mu0) < 2.0 / 100.0);
  CHECK(find_mu_tilde(e, 0.08, mu0) == doctest::Approx(std::log(0.08)).epsilon(1e-8));
  CHECK_THROWS(find_mu_tilde(e, 1e-30, mu0));
}

TEST_CASE("grand-canonical free energy of the ideal gas") {
  for (double V : {100.0, 400.0}) {
    const auto e = ideal_ensemble(V);
    for (double rho : {0.03, 0.05, 0.08}) {
      const double f = gc_free_energy(e, rho, std::log(0.05));
      CHECK(std::abs(f - (rho * std::log(rho) - rho)) < 1e-8);
    }
  }
}

TEST_CASE("log moment generating function") {
  const auto e = tonks_ensemble(80.0, 1.0);
  const double mu0 = tonks_beta_mu(0.03, 1.0);
  CHECK(log_mgf(e, mu0, 0.0) == 0.0);
  CHECK(log_mgf(e, mu0, 0.2) == doctest::Approx(log_mgf_direct(e, mu0, 0.2)).epsilon(1e-12));
}

TEST_CASE("duality point") {
  const auto e = ideal_ensemble(200.0);
  const auto dp = duality_point(e, std::log(0.05));
  CHECK(dp.N_bar == 10);
  CHECK(dp.N_star == 10);
  CHECK(std::isnan(dp.mu_consistency_residual));
  const auto j = to_json(dp);
  CHECK(j.contains("schema_version"));
  CHECK(j.at("N_star") == 10);
}

TEST_CASE("infinite-volume Tonks model") {
  const auto t = compute_table(PairPotential::hard_rod(1.0), 1.0, SimulationRegion::infinite_volume(1), 4,
                               TableMode::infinite_volume);
  const InfiniteVolumeModel m(1.0, t);
  const double rho = 0.03;
  // truncated series against the closed form equation of state
  CHECK(m.pressure_series(rho) == doctest::Approx(tonks_pressure(rho, 1.0)).epsilon(1e-7));
  CHECK(m.mu_of_rho(rho) == doctest::Approx(tonks_beta_mu(rho, 1.0)).epsilon(1e-6));
  const double mu = m.mu_of_rho(rho);
  CHECK(m.rho_of_mu(mu) == doctest::Approx(rho).epsilon(1e-10));
  CHECK(m.pressure(mu) == doctest::Approx(m.pressure_series(rho)).epsilon(1e-9));
  CHECK(m.legendre_of_pressure(rho) == doctest::Approx(m.f(rho)).epsilon(1e-7));
  CHECK(m.rho0(mu) == doctest::Approx(rho).epsilon(1e-7));
  // sigma^2 = rho (1 - rho)^2 for hard rods
  CHECK(m.sigma2(rho) == doctest::Approx(rho * 0.97 * 0.97).epsilon(1e-5));
  CHECK_NOTHROW(m.require_convergent(0.03));
  CHECK_THROWS_AS(m.require_convergent(0.9), RegimeError);
}
