#include <cmath>
#include <cstring>
#include <filesystem>
#include <vector>

#include "doctest.h"

#include "clusterdev/cluster_coeffs.hpp"
#include "clusterdev/errors.hpp"
#include "clusterdev/graph_enum.hpp"
#include "clusterdev/kernels/graph_quadrature.hpp"
#include "clusterdev/oracle.hpp"

using namespace clusterdev;

TEST_CASE("infinite-volume coefficients of hard rods") {
  const auto rod = PairPotential::hard_rod(1.0);
  CHECK(std::abs(beta_n_infinite(rod, 1.0, 1, 1).value + 2.0) < 1e-10);
  CHECK(std::abs(beta_n_infinite(rod, 1.0, 2, 1).value + 1.5) < 1e-6);
  CHECK(std::abs(beta_n_infinite(rod, 1.0, 3, 1).value + 4.0 / 3.0) < 1e-6);
  CHECK(beta_n_infinite(PairPotential::zero(), 1.0, 3, 1).value == 0.0);
  // rod of length a: beta_n = -(n+1) a^n / n
  const auto half = PairPotential::hard_rod(0.5);
  CHECK(std::abs(beta_n_infinite(half, 1.0, 2, 1).value + 1.5 * 0.25) < 1e-8);
}

TEST_CASE("square well first coefficient") {
  // beta_1 = int f = -2a + 2(R-a)(e^{beta eps} - 1)
  const auto sw = PairPotential::square_well(1.0, 1.5, 0.4);
  const double expect = -2.0 + 2.0 * 0.5 * std::expm1(0.8);
  CHECK(beta_n_infinite(sw, 2.0, 1, 1).value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("finite-volume 2-connected coefficients") {
  const auto rod = PairPotential::hard_rod(1.0);
  const auto reg = SimulationRegion::box(1, 100.0);
  CHECK(b_lambda_2connected(rod, 1.0, reg, 1).value == doctest::Approx(-1.99).epsilon(1e-12));
  CHECK(b_lambda_2connected(PairPotential::zero(), 1.0, reg, 2).value == 0.0);
}

TEST_CASE("polymer and 2-connected first coefficient") {
  const auto rod = PairPotential::hard_rod(1.0);
  for (double L : {20.0, 50.0, 100.0}) {
    const auto reg = SimulationRegion::box(1, L);
    const double b2c = b_lambda_2connected(rod, 1.0, reg, 1).value;
    const auto poly = b_lambda_polymer(rod, 1.0, reg, 1);
    const double bp = poly.value;
    // equal up to the truncated polymer orders, reported as the uncertainty
    CHECK(std::abs(bp - L * std::log1p(b2c / L)) <= poly.error);
    CHECK(bp < -2.0);
  }
}

TEST_CASE("polymer table reproduces exact Tonks log Z") {
  const auto rod = PairPotential::hard_rod(1.0);
  const auto reg = SimulationRegion::box(1, 50.0);
  const auto t = compute_table(rod, 1.0, reg, 3, TableMode::polymer_exact);
  // log Z(N) = N ln V - ln N! + N sum_{n<N} P_N(n) B(n)/(n+1) is exact for N <= n_max + 1.
  for (long N = 2; N <= 4; ++N) {
    double s = N * std::log(50.0) - std::lgamma(N + 1.0);
    for (int n = 1; n < N; ++n) {
      double p = 1.0;
      for (int k = 1; k <= n; ++k) p *= static_cast<double>(N - k) / 50.0;
      s += N * p * t.value(n) / (n + 1);
    }
    CHECK(std::abs(s - tonks_log_z(N, 50.0, 1.0).value) < 1e-9);
  }
}

TEST_CASE("oracle fit") {
  const auto reg = SimulationRegion::box(1, 50.0);
  std::vector<double> zero_lz, tonks_lz;
  for (long N = 1; N <= 8; ++N) {
    zero_lz.push_back(N * std::log(50.0) - std::lgamma(N + 1.0));
    tonks_lz.push_back(tonks_log_z(N, 50.0, 1.0).value);
  }
  const auto z = fit_coefficients_from_oracle(zero_lz, 1.0, reg, 3);
  for (double v : z.values) CHECK(std::abs(v) < 1e-12);
  const auto f = fit_coefficients_from_oracle(tonks_lz, 1.0, reg, 3);
  const auto poly = b_lambda_polymer(PairPotential::hard_rod(1.0), 1.0, reg, 1).value;
  CHECK(f.values[0] == doctest::Approx(poly).epsilon(1e-3));
  CHECK(f.mode == TableMode::oracle_fitted);
  CHECK_THROWS_AS(fit_coefficients_from_oracle(tonks_lz, 1.0, reg, 3, 1.0), FitError);
}

TEST_CASE("decay fit") {
  const auto inf = SimulationRegion::infinite_volume(1);
  const auto t = compute_table(PairPotential::hard_rod(1.0), 1.0, inf, 4, TableMode::infinite_volume);
  const auto lo = decay_fit(t, 0.03);
  CHECK(lo.c > 0.0);
  CHECK_FALSE(lo.violation);
  CHECK(decay_fit(t, 0.9).violation);
  const auto zt = compute_table(PairPotential::zero(), 1.0, inf, 3, TableMode::infinite_volume);
  CHECK(zt.all_zero());
  CHECK_THROWS_AS(decay_fit(zt, 0.03), FitError);
}

TEST_CASE("table JSON round trip") {
  const auto reg = SimulationRegion::box(1, 30.0);
  auto t = compute_table(PairPotential::square_well(1.0, 1.5, 0.3), 1.0, reg, 2, TableMode::two_connected);
  const auto j = to_json(t);
  CHECK(j.at("schema_version") == kClusterTableSchema);
  const auto back = table_from_json(j);
  CHECK(back.values == t.values);
  CHECK(back.uncertainty == t.uncertainty);
  CHECK(back.potential.well_depth == t.potential.well_depth);
  CHECK(back.region.side == 30.0);
  const auto path = std::filesystem::temp_directory_path() / "clusterdev_table.json";
  save_table(t, path.string());
  CHECK(load_table(path.string()).values == t.values);
  std::filesystem::remove(path);
  auto bad = j;
  bad["schema_version"] = 99;
  CHECK_THROWS(table_from_json(bad));
}

TEST_CASE("graph quadrature serial and OpenMP agree bitwise") {
  const auto sw = PairPotential::square_well(1.0, 1.5, 0.4);
  const auto fam = enumerate(4, GraphPredicate::biconnected);
  kernels::GraphIntegral p;
  p.potential = &sw;
  p.vertices = 4;
  p.family = &fam.masks;
  p.leaf = kernels::Leaf::family_sum;
  p.domain = kernels::Domain::pinned;
  const double s = kernels::integrate_graph_serial(p);
  const double o = kernels::integrate_graph_omp(p, 3);
  CHECK(std::memcmp(&s, &o, sizeof s) == 0);

  kernels::McIntegral mc;
  mc.base = p;
  mc.dim = 2;
  mc.samples = 1u << 15;
  mc.seed = 42;
  const auto ms = kernels::integrate_graph_mc_serial(mc);
  const auto mo = kernels::integrate_graph_mc_omp(mc, 3);
  CHECK(std::memcmp(&ms.value, &mo.value, sizeof ms.value) == 0);
  CHECK(std::memcmp(&ms.std_error, &mo.std_error, sizeof ms.std_error) == 0);
}

TEST_CASE("Monte Carlo hard disk area") {
  const auto disk = PairPotential::hard_rod(1.0);
  IntegrationConfig cfg;
  cfg.scheme = Scheme::monte_carlo;
  cfg.samples = 1u << 18;
  const auto q = beta_n_infinite(disk, 1.0, 1, 2, cfg);
  CHECK(std::abs(q.value + M_PI) <= q.error);
}
