#include <cmath>
#include <vector>

#include "doctest.h"

#include "clusterdev/errors.hpp"
#include "clusterdev/potentials.hpp"

using namespace clusterdev;

TEST_CASE("potential values") {
  const double x0[] = {0.5};
  CHECK(evaluate(PairPotential::zero(), x0, 1) == 0.0);
  CHECK(std::isinf(evaluate(PairPotential::hard_rod(1.0), x0, 1)));
  const double x1[] = {1.5};
  CHECK(evaluate(PairPotential::square_well(1.0, 2.0, 0.7), x1, 1) == doctest::Approx(-0.7));
  const double x2[] = {0.6, 0.8};
  CHECK(evaluate(PairPotential::square_well(1.0, 2.0, 0.7), x2, 2) == doctest::Approx(-0.7));
}

TEST_CASE("mayer f") {
  const double a[] = {0.3}, b[] = {1.7};
  CHECK(mayer_f(PairPotential::zero(), 1.0, a, 1) == 0.0);
  CHECK(mayer_f(PairPotential::hard_rod(1.0), 1.0, a, 1) == -1.0);
  CHECK(mayer_f(PairPotential::hard_rod(1.0), 1.0, b, 1) == 0.0);
  CHECK(mayer_f_radial(PairPotential::square_well(1.0, 2.0, 0.5), 2.0, 1.5) == doctest::Approx(std::expm1(1.0)));
}

TEST_CASE("C(beta)") {
  CHECK(c_beta(PairPotential::zero(), 1.0, 1).value == 0.0);
  CHECK(std::abs(c_beta(PairPotential::hard_rod(1.0), 1.0, 1).value - 2.0) < 1e-10);
  CHECK(c_beta(PairPotential::hard_rod(1.0), 1.0, 2).value == doctest::Approx(M_PI).epsilon(1e-8));
  // square well: 2a + 2(R-a)(e^{beta eps}-1) in one dimension
  const double sw = c_beta(PairPotential::square_well(1.0, 2.0, 0.5), 1.0, 1).value;
  CHECK(sw == doctest::Approx(2.0 + 2.0 * std::expm1(0.5)).epsilon(1e-12));
}

TEST_CASE("condition star") {
  CHECK(check_condition_star(0.0, 3.0, 0.25).ok);
  CHECK(check_condition_star(0.0, 3.0, 0.25).ratio == 0.0);
  const auto s = check_condition_star(0.03, 2.0, 0.25);
  CHECK(s.ok);
  CHECK(s.ratio == doctest::Approx(0.24));
  CHECK_FALSE(check_condition_star(0.2, 2.0, 0.25).ok);
}

TEST_CASE("invalid potentials") {
  CHECK_THROWS_AS(PairPotential::square_well(2.0, 1.0, 0.5).validate(), ArgumentError);
  CHECK_THROWS_AS(PairPotential::hard_rod(-1.0).validate(), ArgumentError);
  const double x[] = {0.1, 0.2};
  CHECK_THROWS_AS(evaluate(PairPotential::hard_rod(1.0), x, 1), ArgumentError);
}

TEST_CASE("stability") {
  CHECK(verify_stability(PairPotential::hard_rod(1.0), 1, 4, 2000).ok);
  auto sw = PairPotential::square_well(1.0, 2.0, 0.5);
  sw.stability_B = 0.5;  // one well partner per side at most
  CHECK(verify_stability(sw, 1, 5, 2000).ok);
  sw.stability_B = 0.0;
  CHECK_FALSE(verify_stability(sw, 1, 5, 2000).ok);
}
