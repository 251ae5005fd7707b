#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clusterdev/integration.hpp"
#include "clusterdev/potentials.hpp"
#include "clusterdev/region.hpp"
#include "clusterdev/thermo.hpp"

namespace clusterdev {

enum class OracleMethod { closed_form, quadrature, monte_carlo, char_fn_inversion };
std::string to_string(OracleMethod m);

struct OracleResult {
  double value = 0.0;  // log domain for partition functions
  OracleMethod method = OracleMethod::closed_form;
  double error = 0.0;
  std::uint64_t seed = 0;
};

// Hard rods of length a with centers in [0, L]:
// Z(N) = (L - (N-1)a)^N / N!. Infeasible packings give -inf.
OracleResult tonks_log_z(long N, double L, double a);

// Infinite-volume Tonks equation of state beta p = rho/(1 - rho a) and the
// matching beta mu = ln rho - ln(1 - rho a) + rho a/(1 - rho a).
double tonks_pressure(double rho, double a);
double tonks_beta_mu(double rho, double a);

// (1/N!) times the integral of prod(1 + f) over Lambda^N.
OracleResult quadrature_log_z(const PairPotential& pot, double beta, const SimulationRegion& region, long N,
                              const IntegrationConfig& cfg = {}, long n_quad_max = 0);

double poisson_log_pmf(long N, double lambda);

Ensemble ideal_ensemble(double volume, double beta = 1.0);
Ensemble tonks_ensemble(double L, double a, double beta = 1.0);

struct ProbabilityVector {
  std::vector<double> p;  // N = 0..n_max
  long n_max = 0;
  double truncation = 0.0;  // bound on the mass beyond n_max
  double log_xi = 0.0;
};

ProbabilityVector exact_probabilities(const Ensemble& ens, double mu0);

struct ProbabilityInterval {
  double lo = 0.0;
  double hi = 0.0;
  double value() const { return 0.5 * (lo + hi); }
};

// e^{beta mu0 N} Z(N) / Xi(mu0); beyond the cutoff the answer is the
// interval [0, truncation bound].
ProbabilityInterval exact_prob(const Ensemble& ens, double mu0, long N);

// (1/2pi) int e^{-itN} phi(t) dt evaluated by the discrete Fourier pair on
// M > n_max points, exact for finite support.
double char_fn_invert(const std::vector<double>& probabilities, long N_target);

}  // namespace clusterdev
