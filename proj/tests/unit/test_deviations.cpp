#include <cmath>
#include <cstring>

#include "doctest.h"

#include "clusterdev/deviations.hpp"
#include "clusterdev/errors.hpp"
#include "clusterdev/oracle.hpp"

using namespace clusterdev;

namespace {
FreeEnergyModel model(const PairPotential& pot, double L, int n_max) {
  const auto reg = SimulationRegion::box(1, L);
  return {1.0, reg, compute_table(pot, 1.0, reg, n_max, TableMode::polymer_exact)};
}
double factorial(int m) { return std::tgamma(m + 1.0); }
}  // namespace

TEST_CASE("deviation specs") {
  const auto m = model(PairPotential::zero(), 100.0, 1);
  DualityPoint dp;
  dp.N_bar = 5;
  dp.N_star = 5;
  const auto s0 = make_deviation(m, dp, 0.5, 0.0);
  CHECK(s0.N_tilde == 5);
  CHECK(s0.effective_u == 0.0);
  const auto s = make_deviation(m, dp, 0.5, 0.31);
  CHECK(s.N_tilde == 8);
  CHECK(s.effective_u == doctest::Approx(0.3));
  const auto s1 = make_deviation(m, dp, 1.0, 0.01);
  CHECK(s1.N_tilde == 6);
  CHECK(s1.center == Center::n_bar);
}

TEST_CASE("m(alpha)") {
  CHECK(m_alpha(0.5) == 3);
  CHECK(m_alpha(2.0 / 3.0) == 4);
  CHECK(m_alpha(0.75) == 5);
  CHECK(m_alpha(0.6) == 3);
  CHECK_THROWS_AS(m_alpha(1.0), DomainError);
}

TEST_CASE("grand-canonical rate") {
  const auto e = ideal_ensemble(400.0);
  const double mu0 = std::log(0.05);
  CHECK(std::abs(rate_i_gc(e, 0.05, 0.05, mu0)) < 1e-12);
  const double poisson = 0.06 * std::log(0.06 / 0.05) - 0.06 + 0.05;
  CHECK(rate_i_gc(e, 0.06, 0.05, mu0) == doctest::Approx(poisson).epsilon(1e-6));
}

TEST_CASE("pre-factor variances") {
  const auto m = model(PairPotential::zero(), 100.0, 1);
  CHECK(variance_d(m, 0.05) == doctest::Approx(0.05).epsilon(1e-14));
  const auto t = model(PairPotential::hard_rod(1.0), 100.0, 3);
  CHECK(variance_d(t, 0.03) < 0.03);
  for (double u : {0.0, 0.4, -0.4}) {
    const double d = variance_d(t, 0.03);
    for (auto var : {DVariant::plain, DVariant::plus, DVariant::minus}) {
      const double da = variance_d_alpha(t, 0.03, 0.5, u, var);
      CHECK(std::memcmp(&d, &da, sizeof d) == 0);
    }
  }
  CHECK(variance_d_alpha(t, 0.03, 0.75, 0.4, DVariant::plus) != variance_d(t, 0.03));
}

TEST_CASE("expansion error of the ideal gas against closed-form derivatives") {
  const double V = 100.0, alpha = 0.5, v = 0.3, rho = 0.05, mu0 = std::log(0.05);
  const auto m = model(PairPotential::zero(), V, 1);
  const int ma = m_alpha(alpha), mt = ma + 6;
  const double q = 1.0 - alpha;
  double bracket = v * (mu0 - std::log(rho)) * std::pow(V, ma * q + alpha - 1.0);
  for (int k = ma; k <= mt; ++k) {
    const double dk = (k % 2 == 0 ? 1.0 : -1.0) * factorial(k - 2) / std::pow(rho, k - 1);
    bracket += std::pow(v, k) / (factorial(k) * std::pow(V, (k - ma) * q)) * dk;
  }
  const double expect = std::pow(V, 1.0 - ma * q) * std::abs(bracket);
  const auto e = error_e(m, alpha, v, rho, mu0);
  CHECK(std::abs(e.value - expect) < 1e-10);
  CHECK(e.tail > 0.0);
  const auto e0 = error_e(m, alpha, 0.0, rho, mu0);
  CHECK(e0.total() == 0.0);
}

TEST_CASE("J and K") {
  const auto m = model(PairPotential::hard_rod(1.0), 100.0, 3);
  const Ensemble e = make_ensemble(m);
  const double mu0 = tonks_beta_mu(0.03, 1.0);
  CHECK(log_j(e, mu0, 3, 3) == 0.0);
  const auto dp = duality_point(e, mu0, &m);
  const auto kc = k_check(m, e, mu0, dp.N_star, 0.5);
  CHECK(kc.identity_residual < 1e-12);
  const auto jx = j_expansion(m, e, mu0, dp.N_star + 2, dp.N_star, 0.5);
  CHECK(jx.remainder == doctest::Approx(jx.log_j - jx.gaussian - jx.stirling_exact));
  const auto o2 = option2(e, mu0, dp.N_star + 1, dp.N_star);
  CHECK(o2.probability == doctest::Approx(exact_prob(e, mu0, dp.N_star + 1).value()).epsilon(1e-12));
}

TEST_CASE("infinite-volume rate") {
  const auto t = compute_table(PairPotential::zero(), 1.0, SimulationRegion::infinite_volume(1), 2,
                               TableMode::infinite_volume);
  const InfiniteVolumeModel ivm(1.0, t);
  CHECK(rate_i_infinite(ivm, 0.05, 0.05) == 0.0);
  CHECK(rate_i_infinite(ivm, 0.07, 0.05) == doctest::Approx(0.07 * std::log(0.07 / 0.05) - 0.07 + 0.05).epsilon(1e-12));
}

TEST_CASE("deviation reports against the Poisson oracle") {
  const auto m = model(PairPotential::zero(), 200.0, 1);
  const Ensemble orc = ideal_ensemble(200.0);
  const double mu0 = std::log(0.05);
  const auto r = lclt(m, mu0, 0.0, &orc);
  CHECK(r.kind == "lclt");
  CHECK(r.has_oracle);
  CHECK(r.within_budget);
  CHECK(r.oracle_residual / r.oracle < 0.01);
  const auto p = precise_ld(m, mu0, 0.01, &orc, 5.0);
  CHECK(p.spec.N_tilde == 12);
  CHECK(p.within_budget);
  const auto md = moderate_dev(m, mu0, 0.3, 2.0 / 3.0, &orc);
  CHECK(md.m_alpha == 4);
  CHECK(std::isfinite(md.estimate));
  const auto row = deviation_csv_row(r);
  CHECK(row.size() == deviation_csv_header().size());
  CHECK(to_json(p).at("schema_version") == 1);
}

TEST_CASE("theorem constant calibration") {
  const double c = calibrate_theorem_constant({{100.0, 0.1, 0.102}, {200.0, 0.1, 0.1005}}, 1.5);
  CHECK(c == doctest::Approx(3.0));
}

TEST_CASE("region masses") {
  const auto e = ideal_ensemble(200.0);
  const auto rm = lemma_region_masses(e, std::log(0.05), 10, 0.5, 1.0, 0.7, 1.0, 1);
  CHECK(rm.split);
  CHECK(rm.inner + rm.intermediate + rm.outer == doctest::Approx(1.0).epsilon(1e-12));
}
